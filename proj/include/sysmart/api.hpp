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

// The /v1 HTTP/JSON API, independent of any HTTP library. ApiServer
// (http_server.hpp) adapts it to sockets; tests can call handle() directly.
//
//   POST /v1/positions                          {"packet_hex"} | {store_id, cart_id, tag_id}
//   GET  /v1/stores/{sid}/carts
//   GET  /v1/stores/{sid}/products/{pid}
//   GET  /v1/products/{pid}/branches?origin={sid}
//   GET  /v1/stores/{sid}/lanes
//   GET  /v1/stores/{sid}/lanes/fastest?items=N
//   POST /v1/stores/{sid}/carts/{cid}/assistance
//   POST /v1/stores/{sid}/carts/{cid}/malfunction
//   GET  /v1/stores/{sid}/assistance?status=Open
//   GET  /v1/stores/{sid}/malfunction?status=Open
//   POST /v1/assistance/{id}/ack | /resolve
//   POST /v1/malfunction/{id}/ack | /resolve
//   GET  /v1/stores/{sid}/snapshot
//   POST /v1/sync                               Snapshot JSON
//   GET  /v1/foodtags
//   PUT  /v1/foodtags/{tid}                     raw dump octets, or {"dump_hex"}
//   GET  /v1/foodtags/{tid}/summary
//   GET  /v1/foodtags/{tid}/log?format=json|csv
//
// Errors come back as {"error": <category>, "message": <text>} with 404 for
// unknown references, 409 for state/transition conflicts, 422 for malformed
// input and 400 for unparseable JSON.

#include <map>
#include <string>

#include "sysmart/error.hpp"
#include "sysmart/service.hpp"

namespace sysmart::api {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string content_type;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

int http_status(ErrorCode code);

class Api {
 public:
  explicit Api(backend::Service& service) : service_(service) {}

  ApiResponse handle(const ApiRequest& request);

 private:
  backend::Service& service_;
};

}  // namespace sysmart::api
