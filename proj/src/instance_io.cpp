#include <spectral/instance_io.hpp>

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spectral
{

using nlohmann::json;

std::string instance_to_json(const SpectralInstance& inst)
{
    json j;
    j["n"] = inst.n;
    j["k"] = inst.k();
    j["freqs"] = inst.freqs;

    std::vector<double> re, im;
    for (const auto& c : inst.coeffs)
    {
        re.push_back(c.real());
        im.push_back(c.imag());
    }
    j["coeff_re"]    = re;
    j["coeff_im"]    = im;
    j["obs_indices"] = inst.obs_indices;

    re.clear();
    im.clear();
    for (const auto& x : inst.obs_samples)
    {
        re.push_back(x.real());
        im.push_back(x.imag());
    }
    j["obs_re"] = re;
    j["obs_im"] = im;
    j["seed"]   = inst.seed;
    return j.dump(2) + "\n";
}

SpectralInstance instance_from_json(const std::string& text)
{
    const json j = json::parse(text);

    SpectralInstance inst;
    inst.n     = j.at("n").get<Index>();
    inst.freqs = j.at("freqs").get<std::vector<double>>();
    const auto cre = j.at("coeff_re").get<std::vector<double>>();
    const auto cim = j.at("coeff_im").get<std::vector<double>>();
    inst.obs_indices = j.at("obs_indices").get<std::vector<Index>>();
    const auto ore = j.at("obs_re").get<std::vector<double>>();
    const auto oim = j.at("obs_im").get<std::vector<double>>();
    inst.seed = j.value("seed", std::uint64_t{0});

    if (inst.n < 1)
    {
        throw std::invalid_argument("instance: n must be positive");
    }
    if (cre.size() != inst.freqs.size() || cim.size() != inst.freqs.size())
    {
        throw std::invalid_argument("instance: coefficient arrays do not match freqs");
    }
    if (j.contains("k") && j.at("k").get<std::size_t>() != inst.freqs.size())
    {
        throw std::invalid_argument("instance: k does not match freqs");
    }
    if (ore.size() != inst.obs_indices.size() ||
        oim.size() != inst.obs_indices.size())
    {
        throw std::invalid_argument("instance: observation arrays do not match obs_indices");
    }
    for (std::size_t t = 0; t < inst.obs_indices.size(); ++t)
    {
        const Index l = inst.obs_indices[t];
        if (l < 0 || l >= inst.n || (t > 0 && l <= inst.obs_indices[t - 1]))
        {
            throw std::invalid_argument("instance: obs_indices must be strictly increasing in [0, n)");
        }
    }
    for (std::size_t j2 = 0; j2 < cre.size(); ++j2)
    {
        inst.coeffs.emplace_back(cre[j2], cim[j2]);
    }
    for (std::size_t t = 0; t < ore.size(); ++t)
    {
        inst.obs_samples.emplace_back(ore[t], oim[t]);
    }
    return inst;
}

void write_instance(const SpectralInstance& inst,
                    const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << instance_to_json(inst);
    if (!out)
    {
        throw std::runtime_error("failed writing " + path.string());
    }
}

SpectralInstance read_instance(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return instance_from_json(buf.str());
}

} // namespace spectral
