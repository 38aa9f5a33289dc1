#pragma once

#include <string>

#include "culturescope/providers.hpp"

namespace culturescope {

// Deterministic stand-in for every pipeline role. Replies are pure functions
// of the request (task, language, prompt text), so hermetic runs are
// reproducible byte for byte.
class MockChatProvider final : public ChatProvider {
 public:
  explicit MockChatProvider(std::string id = "mock-chat", CallLog* log = nullptr);
  ChatResponse chat(const ChatRequest& request) override;
  std::string id() const override { return id_; }
  bool is_mock() const override { return true; }

  static std::string reply(const ChatRequest& request);

 private:
  std::string id_;
  CallLog* log_;
};

}  // namespace culturescope
