#include "passgate/flows/mailer.hpp"

#include <cctype>

namespace passgate::flows {

DeliveryResult CaptureMailer::send(const MailMessage& message) {
  std::lock_guard lock(mutex_);
  messages_.push_back(message);
  return {true, "captured"};
}

std::vector<MailMessage> CaptureMailer::messages() const {
  std::lock_guard lock(mutex_);
  return messages_;
}

std::size_t CaptureMailer::count() const {
  std::lock_guard lock(mutex_);
  return messages_.size();
}

std::optional<MailMessage> CaptureMailer::last_to(std::string_view recipient) const {
  std::lock_guard lock(mutex_);
  for (auto it = messages_.rbegin(); it != messages_.rend(); ++it) {
    if (it->to == recipient) return *it;
  }
  return std::nullopt;
}

void CaptureMailer::clear() {
  std::lock_guard lock(mutex_);
  messages_.clear();
}

DeliveryResult LogMailer::send(const MailMessage& message) {
  std::lock_guard lock(mutex_);
  out_ << "[mail] to=" << message.to << " subject=\"" << message.subject << "\"\n"
       << message.body << '\n';
  out_.flush();
  return {true, "logged"};
}

std::optional<std::string> extract_code(std::string_view body) {
  std::size_t i = 0;
  while (i < body.size()) {
    if (!std::isdigit(static_cast<unsigned char>(body[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < body.size() && std::isdigit(static_cast<unsigned char>(body[j]))) ++j;
    if (j - i == 6 || j - i == 8) return std::string(body.substr(i, j - i));
    i = j;
  }
  return std::nullopt;
}

}  // namespace passgate::flows
