#pragma once

#include <stdexcept>
#include <string>

namespace mednorm {

// Base class for all library errors. Callers that only need "did it work"
// can catch this; tests catch the concrete types below.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyPhrase : public Error {
public:
  EmptyPhrase() : Error("phrase has no tokens") {}
  explicit EmptyPhrase(const std::string& msg) : Error(msg) {}
};

class EmptyCorpus : public Error {
public:
  EmptyCorpus() : Error("corpus is empty") {}
};

class InvalidArgument : public Error {
public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class MalformedLine : public Error {
public:
  MalformedLine(const std::string& path, std::size_t line_no, const std::string& what_part)
      : Error(path + ":" + std::to_string(line_no) + ": malformed line: " + what_part),
        line(line_no) {}
  std::size_t line;
};

class DuplicateId : public Error {
public:
  explicit DuplicateId(const std::string& dup_id, std::size_t line_no)
      : Error("duplicate concept id '" + dup_id + "' at line " + std::to_string(line_no)),
        id(dup_id), line(line_no) {}
  std::string id;
  std::size_t line;
};

class UnknownConcept : public Error {
public:
  UnknownConcept(const std::string& concept_id, std::size_t line_no)
      : Error("unknown concept id '" + concept_id + "' at line " + std::to_string(line_no)),
        id(concept_id), line(line_no) {}
  std::string id;
  std::size_t line;
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class ZeroVector : public Error {
public:
  ZeroVector() : Error("cosine undefined for zero-norm vector") {}
};

class AllTokensOOV : public Error {
public:
  AllTokensOOV() : Error("no token of the phrase is in the vector table") {}
};

class OOVToken : public Error {
public:
  explicit OOVToken(const std::string& tok)
      : Error("token '" + tok + "' missing from vector table"), token(tok) {}
  std::string token;
};

class LengthMismatch : public Error {
public:
  explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

class TooFewItems : public Error {
public:
  explicit TooFewItems(const std::string& msg) : Error(msg) {}
};

class IndexOutOfBounds : public Error {
public:
  explicit IndexOutOfBounds(const std::string& msg) : Error(msg) {}
};

} // namespace mednorm
