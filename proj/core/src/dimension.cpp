#include "opttopo/dimension.hpp"

#include <cmath>

namespace opttopo {

const char* dimension_kind_name(DimensionKind kind) {
    switch (kind) {
        case DimensionKind::FreeParameter: return "free";
        case DimensionKind::ExternalParameter: return "external";
        case DimensionKind::CouplingParameter: return "coupling";
        case DimensionKind::Effort: return "effort";
        case DimensionKind::Benefit: return "benefit";
        case DimensionKind::Internal: return "internal";
    }
    return "internal";
}

DimensionKind dimension_kind_from_name(const std::string& name) {
    if (name == "free") return DimensionKind::FreeParameter;
    if (name == "external") return DimensionKind::ExternalParameter;
    if (name == "coupling") return DimensionKind::CouplingParameter;
    if (name == "effort") return DimensionKind::Effort;
    if (name == "benefit") return DimensionKind::Benefit;
    if (name == "internal") return DimensionKind::Internal;
    throw Error(ErrorCode::ParseError, "unknown dimension kind '" + name + "'");
}

std::uint32_t DimensionRegistry::add(Dimension dim) {
    if (dim.name.empty()) {
        throw Error(ErrorCode::ParseError, "dimension with empty name");
    }
    if (!(dim.interval.lo <= dim.interval.hi)) {
        throw Error(ErrorCode::ParseError,
                    "dimension '" + dim.name + "' has lo > hi");
    }
    if (index_.count(dim.name) != 0) {
        throw Error(ErrorCode::DuplicateDimension, "'" + dim.name + "' registered twice");
    }
    auto id = static_cast<std::uint32_t>(dims_.size());
    index_.emplace(dim.name, id);
    dims_.push_back(std::move(dim));
    return id;
}

std::uint32_t DimensionRegistry::id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw Error(ErrorCode::UnknownDimension, "'" + name + "' is not registered");
    }
    return it->second;
}

} // namespace opttopo
