#include "orderlens/matrix_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "orderlens/errors.hpp"
#include "orderlens/tsv.hpp"

namespace orderlens {

using json = nlohmann::json;

void write_matrix(const FeatureMatrix& matrix, std::ostream& out) {
    out << kMatrixFileHeader << '\n';
    out << "instance";
    for (const auto& d : matrix.descriptors()) out << '\t' << d.feature_id;
    out << '\n';
    for (size_t r = 0; r < matrix.n_rows(); ++r) {
        out << matrix.row_ids()[r];
        for (double v : matrix.row(r)) {
            out << '\t';
            if (is_missing(v))
                out << "NA";
            else
                out << format_double(v);
        }
        out << '\n';
    }
}

FeatureMatrix read_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty stream: missing header");
    if (std::string(strip_cr(line)) != kMatrixFileHeader)
        throw ParseError("unsupported matrix file header '" + line + "'");
    if (!std::getline(in, line)) throw ParseError("missing matrix column header");

    auto header = split_tabs(strip_cr(line));
    if (header.empty() || header[0] != "instance")
        throw ParseError("matrix column header must start with 'instance'");
    std::vector<FeatureDescriptor> descriptors;
    for (size_t i = 1; i < header.size(); ++i) {
        FeatureDescriptor d;
        d.feature_id = std::string(header[i]);
        descriptors.push_back(std::move(d));
    }

    std::vector<std::string> row_ids;
    std::vector<std::vector<double>> rows;
    size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = strip_cr(line);
        if (sv.empty()) continue;
        auto fields = split_tabs(sv);
        if (fields.size() != descriptors.size() + 1)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(descriptors.size() + 1) + " fields, got " +
                             std::to_string(fields.size()));
        row_ids.push_back(std::string(fields[0]));
        std::vector<double> values(descriptors.size());
        for (size_t c = 0; c < descriptors.size(); ++c) {
            if (fields[c + 1] == "NA") {
                values[c] = kMissing;
            } else {
                auto v = parse_double(fields[c + 1]);
                if (!v)
                    throw ParseError("line " + std::to_string(line_no) + ": bad value '" +
                                     std::string(fields[c + 1]) + "'");
                values[c] = *v;
            }
        }
        rows.push_back(std::move(values));
    }

    FeatureMatrix matrix(std::move(row_ids), std::move(descriptors));
    for (size_t r = 0; r < matrix.n_rows(); ++r)
        for (size_t c = 0; c < matrix.n_cols(); ++c) matrix.set(r, c, rows[r][c]);
    return matrix;
}

namespace {

json descriptor_to_json(const FeatureDescriptor& d) {
    return json{{"feature_id", d.feature_id},
                {"clinical_category", to_name(d.clinical_category)},
                {"temporal_category", d.temporal_category},
                {"source_variable", d.source_variable}};
}

ClinicalCategory category_from_name(const std::string& name) {
    for (size_t i = 0; i < kClinicalCategoryNames.size(); ++i)
        if (name == kClinicalCategoryNames[i]) return static_cast<ClinicalCategory>(i);
    throw ParseError("unknown clinical category '" + name + "'");
}

json catalog_manifest() {
    auto slots = [](auto& table) {
        json arr = json::array();
        for (const auto& s : table) arr.push_back({{"id", s.id}, {"name", s.name}});
        return arr;
    };
    return json{{"version", kCatalogVersion},
                {"continuous_lab", slots(kContinuousLabSlots)},
                {"categorical_lab", slots(kCategoricalLabSlots)},
                {"medication", slots(kMedSlots)},
                {"procedure", slots(kProcSlots)},
                {"device", slots(kDeviceSlots)},
                {"demographic", slots(kDemographicSlots)}};
}

}  // namespace

void save_matrix(const FeatureMatrix& matrix, const Vocabulary& vocab,
                 const CategoricalCodes& codes, const std::string& path) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write '" + path + "'");
        write_matrix(matrix, out);
    }

    json meta;
    meta["catalog"] = catalog_manifest();
    json labs = json::object();
    for (const auto& [lab, kind] : vocab.labs)
        labs[lab] = kind == ValueKind::continuous ? "continuous" : "categorical";
    meta["vocabulary"] = {{"labs", labs},
                          {"meds", vocab.meds},
                          {"procedures", vocab.procedures},
                          {"devices", vocab.devices}};
    json code_maps = json::object();
    for (const auto& [lab, map] : codes.by_lab) code_maps[lab] = map.tokens;
    meta["categorical_codes"] = code_maps;
    json desc = json::array();
    for (const auto& d : matrix.descriptors()) desc.push_back(descriptor_to_json(d));
    meta["descriptors"] = desc;

    std::ofstream out(path + ".meta.json", std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + ".meta.json'");
    out << meta.dump(2) << '\n';
}

LoadedMatrix load_matrix(const std::string& path) {
    LoadedMatrix loaded;
    {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path + "'");
        loaded.matrix = read_matrix(in);
    }
    std::ifstream meta_in(path + ".meta.json");
    if (!meta_in) throw IoError("cannot open '" + path + ".meta.json'");
    json meta = json::parse(meta_in);

    if (meta.at("catalog").at("version").get<std::string>() != kCatalogVersion)
        throw ParseError("matrix metadata has catalog version '" +
                         meta["catalog"]["version"].get<std::string>() + "', expected '" +
                         std::string(kCatalogVersion) + "'");

    for (const auto& [lab, kind] : meta.at("vocabulary").at("labs").items())
        loaded.vocabulary.labs[lab] = kind.get<std::string>() == "continuous"
                                          ? ValueKind::continuous
                                          : ValueKind::categorical;
    for (const auto& m : meta.at("vocabulary").at("meds"))
        loaded.vocabulary.meds.insert(m.get<std::string>());
    for (const auto& p : meta.at("vocabulary").at("procedures"))
        loaded.vocabulary.procedures.insert(p.get<std::string>());
    for (const auto& d : meta.at("vocabulary").at("devices"))
        loaded.vocabulary.devices.insert(d.get<std::string>());
    for (const auto& [lab, tokens] : meta.at("categorical_codes").items())
        loaded.codes.by_lab[lab].tokens = tokens.get<std::vector<std::string>>();

    auto desc = meta.at("descriptors");
    if (desc.size() != loaded.matrix.n_cols())
        throw ParseError("matrix metadata descriptor count does not match matrix columns");
    std::vector<FeatureDescriptor> descriptors;
    for (const auto& dj : desc) {
        FeatureDescriptor d;
        d.feature_id = dj.at("feature_id").get<std::string>();
        d.clinical_category = category_from_name(dj.at("clinical_category").get<std::string>());
        d.temporal_category = dj.at("temporal_category").get<std::string>();
        d.source_variable = dj.at("source_variable").get<std::string>();
        descriptors.push_back(std::move(d));
    }
    for (size_t c = 0; c < descriptors.size(); ++c)
        if (descriptors[c].feature_id != loaded.matrix.descriptors()[c].feature_id)
            throw ParseError("matrix metadata descriptors out of order with matrix columns");

    FeatureMatrix with_meta(loaded.matrix.row_ids(), std::move(descriptors));
    for (size_t r = 0; r < loaded.matrix.n_rows(); ++r)
        for (size_t c = 0; c < loaded.matrix.n_cols(); ++c)
            with_meta.set(r, c, loaded.matrix.at(r, c));
    loaded.matrix = std::move(with_meta);
    return loaded;
}

}
