#pragma once

#include <set>
#include <stdexcept>
#include <string>

namespace codebench {

// Root of every error the library raises. Each named failure mode gets its
// own subclass so callers can catch exactly what they handle.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CODEBENCH_DEFINE_ERROR(Name)          \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  };

// corpus
CODEBENCH_DEFINE_ERROR(MalformedDump)
CODEBENCH_DEFINE_ERROR(DuplicateSlug)
CODEBENCH_DEFINE_ERROR(UnrepairableMarkdown)
CODEBENCH_DEFINE_ERROR(IoError)

// metrics
CODEBENCH_DEFINE_ERROR(ZeroLines)

// generation
CODEBENCH_DEFINE_ERROR(MissingFramework)
CODEBENCH_DEFINE_ERROR(NoCodeFound)
CODEBENCH_DEFINE_ERROR(ClientError)
CODEBENCH_DEFINE_ERROR(PromptBudgetExceeded)

// judge
CODEBENCH_DEFINE_ERROR(RunnerUnavailable)
CODEBENCH_DEFINE_ERROR(ProtocolError)
CODEBENCH_DEFINE_ERROR(EmptyPopulation)

// statistics
CODEBENCH_DEFINE_ERROR(AllZeroDifferences)
CODEBENCH_DEFINE_ERROR(ZeroVariance)
CODEBENCH_DEFINE_ERROR(LengthMismatch)
CODEBENCH_DEFINE_ERROR(ConstantSequence)
CODEBENCH_DEFINE_ERROR(EmptyIntersection)
CODEBENCH_DEFINE_ERROR(InvalidArgument)

// pipeline
CODEBENCH_DEFINE_ERROR(ConfigError)

#undef CODEBENCH_DEFINE_ERROR

class LexError : public Error {
 public:
  LexError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class UnresolvedName : public Error {
 public:
  explicit UnresolvedName(std::set<std::string> names)
      : Error(describe(names)), names_(std::move(names)) {}

  const std::set<std::string>& names() const noexcept { return names_; }

 private:
  static std::string describe(const std::set<std::string>& names) {
    std::string out = "no import mapping for:";
    for (const auto& n : names) out += " " + n;
    return out;
  }

  std::set<std::string> names_;
};

class StageFailure : public Error {
 public:
  StageFailure(std::string stage, std::string resume_token, const std::string& cause)
      : Error("stage '" + stage + "' failed: " + cause + " (resume with: " + resume_token + ")"),
        stage_(std::move(stage)),
        resume_token_(std::move(resume_token)) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& resume_token() const noexcept { return resume_token_; }

 private:
  std::string stage_;
  std::string resume_token_;
};

}  // namespace codebench
