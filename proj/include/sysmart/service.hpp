// Copyright 2026 The SysMART Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Single-writer / multi-reader wrapper around StoreDatabase.
//
// All mutations run on one writer thread in submission order. Each runs
// against a private copy of the current state; on success its changes are
// journaled and the copy is published as the new snapshot, on failure the
// copy is dropped. Readers grab the published snapshot and never block the
// writer beyond a pointer copy.

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

#include "sysmart/backend.hpp"

namespace sysmart::backend {

/// Durable, append-only sequence of change batches.
class Journal {
 public:
  virtual ~Journal() = default;
  virtual void append(const std::vector<Change>& batch) = 0;
};

class MemoryJournal final : public Journal {
 public:
  void append(const std::vector<Change>& batch) override;
  std::vector<Change> changes() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Change> changes_;
};

/// One JSON change per line, flushed after each batch.
class FileJournal final : public Journal {
 public:
  explicit FileJournal(std::filesystem::path path);
  void append(const std::vector<Change>& batch) override;

  /// Reads all changes; a missing file yields none. A torn final line (from
  /// a crash mid-write) is ignored, any other bad line is an error.
  static std::vector<Change> load(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Rebuilds a database by applying `changes` in order.
StoreDatabase replay(const std::vector<Change>& changes);

using NowFn = std::function<UnixTime()>;

class Service {
 public:
  /// `journal` may be null. `now` defaults to the system clock.
  Service(StoreDatabase initial, std::shared_ptr<Journal> journal, NowFn now = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  std::shared_ptr<const StoreDatabase> snapshot() const;
  UnixTime now() const { return now_(); }

  /// Runs `fn(db)` on the writer thread and returns its result, rethrowing
  /// its exception. Blocks the caller until done.
  template <typename Fn>
  auto write(Fn&& fn) -> std::invoke_result_t<Fn, StoreDatabase&> {
    using R = std::invoke_result_t<Fn, StoreDatabase&>;
    auto promise = std::make_shared<std::promise<R>>();
    auto future = promise->get_future();
    Task task;
    if constexpr (std::is_void_v<R>) {
      task.apply = [f = std::forward<Fn>(fn)](StoreDatabase& db) mutable { f(db); };
      task.commit = [promise] { promise->set_value(); };
    } else {
      auto value = std::make_shared<std::optional<R>>();
      task.apply = [f = std::forward<Fn>(fn), value](StoreDatabase& db) mutable {
        value->emplace(f(db));
      };
      task.commit = [promise, value] { promise->set_value(std::move(**value)); };
    }
    task.fail = [promise](std::exception_ptr e) { promise->set_exception(e); };
    enqueue(std::move(task));
    return future.get();
  }

 private:
  struct Task {
    std::function<void(StoreDatabase&)> apply;
    std::function<void()> commit;
    std::function<void(std::exception_ptr)> fail;
  };
  void enqueue(Task task);
  void run();

  std::shared_ptr<Journal> journal_;
  NowFn now_;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const StoreDatabase> current_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<Task> queue_;
  bool stopping_ = false;
  std::thread writer_;
};

}  // namespace sysmart::backend
