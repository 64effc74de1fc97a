#include "gsc/model_config.hpp"

namespace gsc {

using nlohmann::json;

void check_allowed_keys(const json& obj, const std::string& path,
                        std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ConfigError(path + ": unknown key `" + item.key() + "`");
    }
}

namespace {

const json* get(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

}  // namespace

double require_number(const json& obj, const std::string& path, const char* key) {
    const json* v = get(obj, key);
    if (!v) throw ConfigError(path + ": missing key `" + key + "`");
    if (!v->is_number()) throw ConfigError(path + ": key `" + key + "` must be a number");
    return v->get<double>();
}

double number_or(const json& obj, const std::string& path, const char* key,
                 double fallback) {
    const json* v = get(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(path + ": key `" + key + "` must be a number");
    return v->get<double>();
}

long require_integer(const json& obj, const std::string& path, const char* key) {
    const json* v = get(obj, key);
    if (!v) throw ConfigError(path + ": missing key `" + key + "`");
    if (!v->is_number_integer())
        throw ConfigError(path + ": key `" + key + "` must be an integer");
    return v->get<long>();
}

long integer_or(const json& obj, const std::string& path, const char* key,
                long fallback) {
    const json* v = get(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer())
        throw ConfigError(path + ": key `" + key + "` must be an integer");
    return v->get<long>();
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
    const json* v = get(obj, key);
    if (!v) throw ConfigError(path + ": missing key `" + key + "`");
    if (!v->is_string()) throw ConfigError(path + ": key `" + key + "` must be a string");
    return v->get<std::string>();
}

std::string string_or(const json& obj, const std::string& path, const char* key,
                      const std::string& fallback) {
    const json* v = get(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(path + ": key `" + key + "` must be a string");
    return v->get<std::string>();
}

ModelPtr model_from_json(const json& cfg, const std::string& path) {
    const std::string type = require_string(cfg, path, "type");
    if (type == "regular_bec") {
        check_allowed_keys(cfg, path, {"type", "l", "r", "eps"});
        const long l = require_integer(cfg, path, "l");
        const long r = require_integer(cfg, path, "r");
        const double eps = require_number(cfg, path, "eps");
        try {
            return make_regular_bec(static_cast<int>(l), static_cast<int>(r), eps);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }
    if (type == "product") {
        check_allowed_keys(cfg, path, {"type", "components"});
        const json* comps = get(cfg, "components");
        if (!comps || !comps->is_array() || comps->empty())
            throw ConfigError(path + ": key `components` must be a non-empty array");
        std::vector<ModelPtr> parts;
        for (std::size_t i = 0; i < comps->size(); ++i)
            parts.push_back(model_from_json((*comps)[i],
                                            path + ".components[" + std::to_string(i) + "]"));
        return make_product_model(std::move(parts));
    }
    throw ConfigError(path + ": unknown model type `" + type + "`");
}

ModelFamily family_from_json(const json& cfg, const std::string& path) {
    const std::string type = require_string(cfg, path, "type");
    if (type != "regular_bec")
        throw ConfigError(path + ": unknown family type `" + type + "`");
    check_allowed_keys(cfg, path, {"type", "l", "r"});
    const long l = require_integer(cfg, path, "l");
    const long r = require_integer(cfg, path, "r");
    if (l < 3) throw ConfigError(path + ": key `l` must be >= 3");
    if (r < l) throw ConfigError(path + ": key `r` must be >= l");
    return regular_bec_family(static_cast<int>(l), static_cast<int>(r));
}

}  // namespace gsc
