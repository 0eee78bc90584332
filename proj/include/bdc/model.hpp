#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "bdc/kernels.hpp"
#include "bdc/linear_autoencoder.hpp"
#include "bdc/neural_autoencoder.hpp"

namespace bdc {

/// A trained autoencoder of either family.
using AutoencoderModel = std::variant<StiefelPoint, Mlp>;

Matrix encode(const AutoencoderModel& model, const Matrix& x);
Matrix decode(const AutoencoderModel& model, const Matrix& z);
Index ambient_dim(const AutoencoderModel& model);
Index latent_dim(const AutoencoderModel& model);
DecoderHandle make_decoder(const AutoencoderModel& model);

// Text model format. Linear: a header line `linear <d> <p>` then d rows of p
// reals. MLP: `mlp <encoder layers> <decoder layers>`, then per layer a line
// `layer <in> <out>`, <in> weight rows and one bias row. Reals use the
// shortest round-trip representation, so save -> load is exact.

void write_model(std::ostream& out, const AutoencoderModel& model);
AutoencoderModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const AutoencoderModel& model);
AutoencoderModel load_model(const std::filesystem::path& path);

}  // namespace bdc
