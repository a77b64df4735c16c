#include "records.hpp"

#include "util.hpp"

namespace lucid {

std::string_view package_type_name(PackageType t) {
    switch (t) {
        case PackageType::Debian: return "Debian";
        case PackageType::Alpine: return "Alpine";
        case PackageType::Redhat: return "Redhat";
        case PackageType::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::optional<PackageType> package_type_from_name(std::string_view name) {
    std::string t = fold_token(name);
    if (t == "debian") return PackageType::Debian;
    if (t == "alpine") return PackageType::Alpine;
    if (t == "redhat") return PackageType::Redhat;
    if (t == "unknown") return PackageType::Unknown;
    return std::nullopt;
}

std::string_view assigner_name(AssignerId a) {
    switch (a) {
        case AssignerId::NVD: return "NVD";
        case AssignerId::Redhat: return "Redhat";
        case AssignerId::Ubuntu: return "Ubuntu";
    }
    return "NVD";
}

std::optional<AssignerId> assigner_from_name(std::string_view name) {
    std::string t = fold_token(name);
    if (t == "nvd") return AssignerId::NVD;
    if (t == "redhat") return AssignerId::Redhat;
    if (t == "ubuntu") return AssignerId::Ubuntu;
    return std::nullopt;
}

bool PackageInventory::contains_name(std::string_view name) const {
    for (const auto& e : entries) {
        if (e.name == name) return true;
    }
    return false;
}

bool PackageInventory::contains(std::string_view name, std::string_view version) const {
    for (const auto& e : entries) {
        if (e.name == name && e.version == version) return true;
    }
    return false;
}

bool is_cve_identifier(std::string_view text) {
    if (text.size() < 13 || text.substr(0, 4) != "CVE-") return false;
    for (int i = 4; i < 8; ++i) {
        if (text[static_cast<std::size_t>(i)] < '0' || text[static_cast<std::size_t>(i)] > '9') return false;
    }
    if (text[8] != '-') return false;
    if (text.size() < 13) return false;
    for (std::size_t i = 9; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    return text.size() - 9 >= 4;
}

} // namespace lucid
