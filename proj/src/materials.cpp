#include "singreg/materials.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "singreg/errors.hpp"

namespace singreg {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

bool parse_number(const std::string& token, double& value)
{
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    return ec == std::errc() && ptr == token.data() + token.size();
}

} // namespace

MaterialRegistry MaterialRegistry::with_builtins()
{
    MaterialRegistry r;
    const auto lj = PotentialSpec::lennard_jones();
    r.add({"he3", "Helium-3", 0.494, lj});
    r.add({"he4", "Helium-4", 0.430, lj});
    r.add({"he6", "Helium-6", 0.347, lj});
    r.add({"h_pol", "polarized Hydrogen", 0.740, lj});
    r.add({"d_pol", "polarized Deuterium", 0.523, lj});
    r.add({"t_pol", "polarized Tritium", 0.428, lj});
    return r;
}

void MaterialRegistry::add(Material material)
{
    if (material.id.empty())
        throw DomainError("material id must not be empty");
    if (!(material.lambda > 0.0))
        throw DomainError("material '" + material.id + "' needs lambda > 0");
    if (entries_.contains(material.id))
        throw DomainError("material '" + material.id + "' is already registered");
    std::string id = material.id;
    entries_.emplace(std::move(id), std::move(material));
}

void MaterialRegistry::load(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#')
            continue;
        auto fail = [&](const std::string& why) {
            std::ostringstream msg;
            msg << source << ":" << line_no << ": " << why;
            throw ParseError(msg.str());
        };
        const auto fields = split(stripped);
        if (fields.size() != 5)
            fail("expected 5 fields id,display_name,lambda,potential_kind,n");
        double lambda = 0.0, n = 0.0;
        if (!parse_number(fields[2], lambda) || !(lambda > 0.0))
            fail("lambda must be a positive number, got '" + fields[2] + "'");
        if (!parse_number(fields[4], n))
            fail("n must be a number, got '" + fields[4] + "'");
        Material m;
        m.id = fields[0];
        m.display_name = fields[1];
        m.lambda = lambda;
        try {
            if (fields[3] == "lj") {
                if (n != 12.0)
                    fail("Lennard-Jones entries have n = 12");
                m.potential = PotentialSpec::lennard_jones();
            } else if (fields[3] == "power") {
                m.potential = PotentialSpec::power_law(n);
            } else {
                fail("potential_kind must be 'lj' or 'power', got '" + fields[3] + "'");
            }
            add(std::move(m));
        } catch (const DomainError& e) {
            fail(e.what());
        }
    }
}

void MaterialRegistry::load_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open registry file " + path.string());
    load(in, path.string());
}

const Material& MaterialRegistry::lookup(std::string_view id) const
{
    const auto it = entries_.find(id);
    if (it == entries_.end()) {
        std::string valid;
        for (const auto& [key, _] : entries_)
            valid += (valid.empty() ? "" : ", ") + key;
        throw NotFoundError("unknown material '" + std::string(id) + "' (valid: " + valid + ")");
    }
    return it->second;
}

std::vector<Material> MaterialRegistry::all() const
{
    std::vector<Material> out;
    for (const auto& [_, m] : entries_)
        out.push_back(m);
    return out;
}

} // namespace singreg
