#pragma once

#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace passgate::flows {

struct MailMessage {
  std::string to;
  std::string subject;
  std::string body;
};

struct DeliveryResult {
  bool delivered = false;
  std::string detail;
};

class Mailer {
 public:
  virtual ~Mailer() = default;
  virtual DeliveryResult send(const MailMessage& message) = 0;
};

/// Test double. Keeps every message; nothing in the flows reads it back.
class CaptureMailer final : public Mailer {
 public:
  DeliveryResult send(const MailMessage& message) override;

  std::vector<MailMessage> messages() const;
  std::size_t count() const;
  std::optional<MailMessage> last_to(std::string_view recipient) const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::vector<MailMessage> messages_;
};

/// Writes each message to a stream. For local runs without a mail relay.
class LogMailer final : public Mailer {
 public:
  explicit LogMailer(std::ostream& out) : out_(out) {}
  DeliveryResult send(const MailMessage& message) override;

 private:
  std::mutex mutex_;
  std::ostream& out_;
};

/// First run of 6 or 8 consecutive digits in a mail body, for tests and the demo.
std::optional<std::string> extract_code(std::string_view body);

}  // namespace passgate::flows
