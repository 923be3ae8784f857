#pragma once

#include <stdexcept>
#include <string>

namespace grammar {

enum class ErrorCode {
    // schema / database
    ConnectionFailed,
    UnsupportedSchemaFeature,
    UnknownTableOrColumn,
    SqlExecutionError,
    NonSelectStatement,
    // templates
    MalformedPlaceholder,
    BackendUnavailable,
    AllCandidatesRejected,
    InsufficientValidCandidates,
    // corpus / retrieval
    EmptyCorpus,
    FirstChunkTooLarge,
    // judging
    JudgeParseFailure,
    NoStatementsExtracted,
    ComparisonParseFailure,
    UndefinedPrecision,
    UndefinedRecall,
    // modular evaluation
    UnjudgedRecord,
    EmptyTagList,
    AllGroupsGap,
    InsufficientAttributes,
    MisalignedInputs,
    // serialization
    IoError,
    FormatError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace grammar
