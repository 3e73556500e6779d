#include "adl/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adl/errors.hpp"

namespace adl {

namespace {

using nlohmann::json;

json gmm_to_json(const Gmm& g) {
    return json{{"weights", g.weights}, {"means", g.means}, {"variances", g.variances}};
}

Gmm gmm_from_json(const json& j) {
    Gmm g;
    g.weights = j.at("weights").get<std::vector<double>>();
    g.means = j.at("means").get<std::vector<std::vector<double>>>();
    g.variances = j.at("variances").get<std::vector<std::vector<double>>>();
    if (g.means.size() != g.weights.size() || g.variances.size() != g.weights.size()) {
        throw ParseError("mixture arrays have inconsistent lengths");
    }
    return g;
}

}  // namespace

std::string model_to_json(const HhmmModel& model) {
    json doc;
    doc["format"] = "adl-hhmm";
    doc["version"] = 1;
    json acts = json::array();
    for (const ActivityHmm& a : model.activities) {
        json ja;
        ja["name"] = a.activity;
        ja["num_states"] = a.num_states;
        ja["entry"] = a.entry_probs;
        ja["trans"] = a.trans;
        ja["exit"] = a.exit_probs;
        json ems = json::array();
        for (const Gmm& g : a.emissions) ems.push_back(gmm_to_json(g));
        ja["emissions"] = std::move(ems);
        acts.push_back(std::move(ja));
    }
    doc["activities"] = std::move(acts);
    doc["top_trans"] = model.top_trans;
    return doc.dump(2) + "\n";
}

HhmmModel model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    if (doc.value("format", "") != "adl-hhmm" || doc.value("version", 0) != 1) {
        throw ParseError("unsupported model format/version");
    }
    HhmmModel model;
    for (const json& ja : doc.at("activities")) {
        ActivityHmm a;
        a.activity = ja.at("name").get<std::string>();
        a.num_states = ja.at("num_states").get<int>();
        a.entry_probs = ja.at("entry").get<std::vector<double>>();
        a.trans = ja.at("trans").get<std::vector<std::vector<double>>>();
        a.exit_probs = ja.at("exit").get<std::vector<double>>();
        for (const json& jg : ja.at("emissions")) a.emissions.push_back(gmm_from_json(jg));
        if (static_cast<int>(a.entry_probs.size()) != a.num_states ||
            static_cast<int>(a.trans.size()) != a.num_states ||
            static_cast<int>(a.emissions.size()) != a.num_states) {
            throw ParseError("activity '" + a.activity + "' has inconsistent state counts");
        }
        model.activities.push_back(std::move(a));
    }
    model.top_trans = doc.at("top_trans").get<std::vector<std::vector<double>>>();
    if (model.top_trans.size() != model.activities.size()) {
        throw ParseError("top_trans size does not match the activity count");
    }
    return model;
}

void save_model(const std::filesystem::path& path, const HhmmModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path.string());
    out << model_to_json(model);
}

HhmmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace adl
