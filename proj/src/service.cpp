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

#include "sysmart/service.hpp"

#include <chrono>

namespace sysmart::backend {

void MemoryJournal::append(const std::vector<Change>& batch) {
  std::lock_guard lock(mutex_);
  changes_.insert(changes_.end(), batch.begin(), batch.end());
}

std::vector<Change> MemoryJournal::changes() const {
  std::lock_guard lock(mutex_);
  return changes_;
}

FileJournal::FileJournal(std::filesystem::path path)
    : path_(std::move(path)), out_(path_, std::ios::app) {
  if (!out_) throw Error(ErrorCode::kIo, "cannot open journal " + path_.string());
}

void FileJournal::append(const std::vector<Change>& batch) {
  for (const auto& c : batch) out_ << c.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "journal write failed: " + path_.string());
}

std::vector<Change> FileJournal::load(const std::filesystem::path& path) {
  std::vector<Change> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error&) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorCode::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": corrupt journal entry");
    }
  }
  return out;
}

StoreDatabase replay(const std::vector<Change>& changes) {
  StoreDatabase db;
  for (const auto& c : changes) db.apply(c);
  return db;
}

Service::Service(StoreDatabase initial, std::shared_ptr<Journal> journal, NowFn now)
    : journal_(std::move(journal)), now_(std::move(now)) {
  if (!now_) {
    now_ = [] {
      return std::chrono::duration_cast<std::chrono::seconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  }
  initial.set_change_sink({});
  current_ = std::make_shared<const StoreDatabase>(std::move(initial));
  writer_ = std::thread([this] { run(); });
}

Service::~Service() {
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  writer_.join();
}

std::shared_ptr<const StoreDatabase> Service::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

void Service::enqueue(Task task) {
  {
    std::lock_guard lock(queue_mutex_);
    if (stopping_) throw Error(ErrorCode::kState, "service is shutting down");
    queue_.push_back(std::move(task));
  }
  queue_cv_.notify_one();
}

void Service::run() {
  for (;;) {
    Task task;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      task = std::move(queue_.front());
      queue_.pop_front();
    }

    try {
      auto next = std::make_shared<StoreDatabase>(*snapshot());
      std::vector<Change> batch;
      next->set_change_sink([&batch](const Change& c) { batch.push_back(c); });
      task.apply(*next);
      next->set_change_sink({});
      if (journal_ && !batch.empty()) journal_->append(batch);
      {
        std::lock_guard lock(snapshot_mutex_);
        current_ = std::move(next);
      }
      task.commit();
    } catch (...) {
      task.fail(std::current_exception());
    }
  }
}

}  // namespace sysmart::backend
