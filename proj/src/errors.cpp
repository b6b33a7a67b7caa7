#include "hookstep/errors.hpp"

namespace hookstep {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::RetryLimitExceeded: return "RetryLimitExceeded";
    case ErrorKind::RerenderLimitExceeded: return "RerenderLimitExceeded";
    case ErrorKind::CrossComponentSetDuringRender: return "CrossComponentSetDuringRender";
    case ErrorKind::UnknownComponent: return "UnknownComponent";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::HookInNormalPhase: return "HookInNormalPhase";
    case ErrorKind::NotAViewSpec: return "NotAViewSpec";
    case ErrorKind::NoSuchHandler: return "NoSuchHandler";
    case ErrorKind::IllegalStep: return "IllegalStep";
    }
    return "EngineError";
}

namespace {

std::string compose(ErrorKind kind, const std::string& detail, std::optional<Path> path,
                    std::optional<std::uint64_t> count) {
    std::string out(to_string(kind));
    if (path) out += " at path " + std::to_string(path->id);
    if (count) out += " (" + std::to_string(*count) + ")";
    if (!detail.empty()) out += ": " + detail;
    return out;
}

}  // namespace

EngineError::EngineError(ErrorKind kind, std::string detail, std::optional<Path> path,
                         std::optional<std::uint64_t> count)
    : std::runtime_error(compose(kind, detail, path, count)),
      kind_(kind), detail_(std::move(detail)), path_(path), count_(count) {}

}  // namespace hookstep
