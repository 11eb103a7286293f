#include "pplab/site_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pplab {

using nlohmann::json;

SiteSet load_site_set(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("site set: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("sites"))
        throw std::invalid_argument("site set: expected object with \"dim\" and \"sites\"");

    SiteSet s;
    s.dim = j.at("dim").get<int>();
    for (const json& js : j.at("sites")) {
        Site site;
        site.id = js.at("id").get<int>();
        site.loc.x = js.at("x").get<double>();
        site.loc.y = js.at("y").get<double>();
        site.attrs.coords = js.at("attrs").get<std::vector<double>>();
        s.sites.push_back(std::move(site));
    }
    s.validate();
    return s;
}

SiteSet load_site_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("site set: cannot open " + path);
    return load_site_set(in);
}

void save_site_set(const SiteSet& s, std::ostream& out) {
    json sites = json::array();
    for (const Site& site : s.sites) {
        sites.push_back({{"id", site.id},
                         {"x", site.loc.x},
                         {"y", site.loc.y},
                         {"attrs", site.attrs.coords}});
    }
    json j = {{"dim", s.dim}, {"sites", std::move(sites)}};
    out << j.dump(2) << '\n';
}

void save_site_set(const SiteSet& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("site set: cannot open " + path + " for writing");
    save_site_set(s, out);
}

}  // namespace pplab
