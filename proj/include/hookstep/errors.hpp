#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hookstep/domains.hpp"

namespace hookstep {

enum class ErrorKind {
    RetryLimitExceeded,
    RerenderLimitExceeded,
    CrossComponentSetDuringRender,
    UnknownComponent,
    TypeMismatch,
    UnboundVariable,
    HookInNormalPhase,
    NotAViewSpec,
    NoSuchHandler,
    IllegalStep,
};

std::string_view to_string(ErrorKind kind);

/// Terminal failure of an engine run. `what()` starts with the variant name.
class EngineError : public std::runtime_error {
public:
    EngineError(ErrorKind kind, std::string detail, std::optional<Path> path = std::nullopt,
                std::optional<std::uint64_t> count = std::nullopt);

    ErrorKind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }
    std::optional<Path> path() const { return path_; }
    // Passes for RetryLimitExceeded, render cycles for RerenderLimitExceeded.
    std::optional<std::uint64_t> count() const { return count_; }

private:
    ErrorKind kind_;
    std::string detail_;
    std::optional<Path> path_;
    std::optional<std::uint64_t> count_;
};

}  // namespace hookstep
