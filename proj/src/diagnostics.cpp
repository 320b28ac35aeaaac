#include "qpplab/diagnostics.hpp"
#include "qpplab/error.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>

namespace qpplab {

namespace {
std::mutex sink_mutex;
WarningCapture* active_capture = nullptr;
}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Duplicate: return "duplicate entry";
    case ErrorKind::MissingQuery: return "missing query";
    case ErrorKind::DegenerateQuery: return "degenerate query";
    case ErrorKind::Alignment: return "alignment error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Undefined: return "undefined statistic";
    case ErrorKind::SampleSize: return "sample size error";
    case ErrorKind::DivisionByZero: return "division by zero";
    case ErrorKind::Dimension: return "dimension mismatch";
    case ErrorKind::Merge: return "merge conflict";
    case ErrorKind::Protocol: return "protocol error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex);
  if (active_capture != nullptr) {
    active_capture->messages_.push_back(message);
    return;
  }
  std::cerr << "warning: " << message << '\n';
}

WarningCapture::WarningCapture() {
  std::lock_guard lock(sink_mutex);
  previous_ = active_capture;
  active_capture = this;
}

WarningCapture::~WarningCapture() {
  std::lock_guard lock(sink_mutex);
  active_capture = previous_;
}

std::vector<std::string> WarningCapture::messages() const {
  std::lock_guard lock(sink_mutex);
  return messages_;
}

std::size_t WarningCapture::count() const {
  std::lock_guard lock(sink_mutex);
  return messages_.size();
}

bool WarningCapture::contains(const std::string& needle) const {
  std::lock_guard lock(sink_mutex);
  return std::any_of(messages_.begin(), messages_.end(),
                     [&](const std::string& m) { return m.find(needle) != std::string::npos; });
}

}  // namespace qpplab
