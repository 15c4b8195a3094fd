#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "singreg/potentials.hpp"

namespace singreg {

struct Material {
    std::string id;
    std::string display_name;
    double lambda = 0.0;
    PotentialSpec potential = PotentialSpec::lennard_jones();
};

// Substances keyed by short id. Lambda is stored as primary data.
class MaterialRegistry {
public:
    // The six built-in Lennard-Jones substances.
    static MaterialRegistry with_builtins();

    // Throws DomainError on lambda <= 0 or a duplicate id.
    void add(Material material);

    // Lines `id,display_name,lambda,potential_kind,n`; blank lines and lines
    // starting with '#' are skipped. Malformed lines throw ParseError with the
    // line number.
    void load(std::istream& in, const std::string& source = "<registry>");
    void load_file(const std::filesystem::path& path);

    // NotFoundError listing the valid ids.
    const Material& lookup(std::string_view id) const;

    // Sorted by id.
    std::vector<Material> all() const;
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, Material, std::less<>> entries_;
};

} // namespace singreg
