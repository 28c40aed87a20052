#include "opttopo/errors.hpp"

namespace opttopo {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::FileIo: return "FileIo";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::MissingInput: return "MissingInput";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::ZeroEffort: return "ZeroEffort";
        case ErrorCode::BadStepCount: return "BadStepCount";
        case ErrorCode::BadStepSize: return "BadStepSize";
        case ErrorCode::UnboundedDimension: return "UnboundedDimension";
        case ErrorCode::DegenerateInterval: return "DegenerateInterval";
        case ErrorCode::UnknownDimension: return "UnknownDimension";
        case ErrorCode::DuplicateDimension: return "DuplicateDimension";
        case ErrorCode::BadModel: return "BadModel";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::DanglingFlow: return "DanglingFlow";
        case ErrorCode::Orphan: return "Orphan";
        case ErrorCode::MultipleSinks: return "MultipleSinks";
        case ErrorCode::UnsupportedSplit: return "UnsupportedSplit";
        case ErrorCode::MissingWeight: return "MissingWeight";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::EmptyTable: return "EmptyTable";
        case ErrorCode::EmptyColumn: return "EmptyColumn";
        case ErrorCode::InsufficientRows: return "InsufficientRows";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::CapExceeded: return "CapExceeded";
        case ErrorCode::BadArgument: return "BadArgument";
    }
    return "Unknown";
}

int error_exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::FileIo: return 3;
        case ErrorCode::ParseError: return 4;
        case ErrorCode::VersionMismatch: return 7;
        case ErrorCode::MissingInput: return 20;
        case ErrorCode::OutOfBounds: return 21;
        case ErrorCode::ZeroEffort: return 22;
        case ErrorCode::BadStepCount: return 23;
        case ErrorCode::BadStepSize: return 24;
        case ErrorCode::UnboundedDimension: return 25;
        case ErrorCode::DegenerateInterval: return 26;
        case ErrorCode::UnknownDimension: return 27;
        case ErrorCode::DuplicateDimension: return 28;
        case ErrorCode::BadModel: return 29;
        case ErrorCode::CycleDetected: return 10;
        case ErrorCode::DanglingFlow: return 11;
        case ErrorCode::Orphan: return 12;
        case ErrorCode::MultipleSinks: return 13;
        case ErrorCode::UnsupportedSplit: return 14;
        case ErrorCode::MissingWeight: return 15;
        case ErrorCode::Infeasible: return 6;
        case ErrorCode::EmptyTable: return 6;
        case ErrorCode::EmptyColumn: return 30;
        case ErrorCode::InsufficientRows: return 31;
        case ErrorCode::RankDeficient: return 32;
        case ErrorCode::CapExceeded: return 33;
        case ErrorCode::BadArgument: return 2;
    }
    return 1;
}

} // namespace opttopo
