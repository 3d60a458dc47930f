#pragma once

#include <stdexcept>
#include <string>

namespace lvmr {

/// Base class for every error raised by the retrieval engine.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input document or file does not match its wire format.
class FormatError : public Error {
  public:
    using Error::Error;
};

/// A caller broke an operation's precondition (unknown id, dim mismatch, ...).
class ContractError : public Error {
  public:
    using Error::Error;
};

/// Remote provider or reranker failed. `transient()` marks failures worth retrying.
class TransportError : public Error {
  public:
    TransportError(const std::string& what, bool transient)
        : Error(what), m_transient(transient)
    {}

    bool transient() const noexcept { return m_transient; }

  private:
    bool m_transient;
};

/// Raised by rerank_candidates when the reranker itself could not answer.
/// Callers may fall back to the identity ordering when `fallback_allowed()`.
class RerankError : public Error {
  public:
    RerankError(const std::string& what, bool fallback_allowed)
        : Error(what), m_fallback_allowed(fallback_allowed)
    {}

    bool fallback_allowed() const noexcept { return m_fallback_allowed; }

  private:
    bool m_fallback_allowed;
};

/// Wraps an error with the pipeline stage it came from ("visual", "aural", "fusion").
class StageError : public Error {
  public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), m_stage(std::move(stage))
    {}

    const std::string& stage() const noexcept { return m_stage; }

  private:
    std::string m_stage;
};

}  // namespace lvmr
