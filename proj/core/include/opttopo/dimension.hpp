#ifndef OPTTOPO_DIMENSION_HPP
#define OPTTOPO_DIMENSION_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opttopo/errors.hpp"

namespace opttopo {

/// Role of a dimension in the subsystem model signature.
///   FreeParameter     adjustable set-point, enumerated on a parameter grid
///   ExternalParameter scenario value, fixed per solve
///   CouplingParameter arbitrary-but-fixed value shared between subsystems
///   Effort            energy input drawn from the virtual root
///   Benefit           useful output; may feed a successor as its flow effort
///   Internal          observed output with no topological role
enum class DimensionKind : std::uint8_t {
    FreeParameter,
    ExternalParameter,
    CouplingParameter,
    Effort,
    Benefit,
    Internal,
};

const char* dimension_kind_name(DimensionKind kind);
DimensionKind dimension_kind_from_name(const std::string& name);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    double width() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

struct Dimension {
    std::string name;
    DimensionKind kind = DimensionKind::Internal;
    std::string unit;
    Interval interval;

    bool operator==(const Dimension&) const = default;
};

/// Owns the single record per dimension symbol. Ids are dense and assigned in
/// registration order, so serialization order is reproducible.
class DimensionRegistry {
  public:
    std::uint32_t add(Dimension dim);

    bool has(const std::string& name) const { return index_.count(name) != 0; }
    std::uint32_t id(const std::string& name) const;
    const Dimension& get(const std::string& name) const { return dims_[id(name)]; }
    const Dimension& get(std::uint32_t id) const { return dims_.at(id); }
    std::size_t size() const { return dims_.size(); }
    const std::vector<Dimension>& all() const { return dims_; }

    bool operator==(const DimensionRegistry&) const = default;

  private:
    std::vector<Dimension> dims_;
    std::map<std::string, std::uint32_t> index_;
};

} // namespace opttopo

#endif
