#ifndef SPECTRAL_INSTANCE_IO_HPP
#define SPECTRAL_INSTANCE_IO_HPP

#include <filesystem>
#include <string>

#include <spectral/core.hpp>

namespace spectral
{

///
/// Instance JSON layout:
///   {n, k, freqs[], coeff_re[], coeff_im[], obs_indices[], obs_re[],
///    obs_im[], seed}
/// Doubles are written in shortest round-trip form.
///
std::string instance_to_json(const SpectralInstance& inst);

/// Parses and validates; observation samples are taken from the file.
SpectralInstance instance_from_json(const std::string& text);

void write_instance(const SpectralInstance& inst,
                    const std::filesystem::path& path);
SpectralInstance read_instance(const std::filesystem::path& path);

} // namespace spectral

#endif // SPECTRAL_INSTANCE_IO_HPP
