#pragma once

#include <string>

#include "bundlechoice/types.hpp"

namespace bundlechoice {

// Long-format CSV: id,t,y,xA_1..xA_dx,xB_1..xB_dx,z_1..z_dz with y encoded as
// {O,A,B,AB}.  Doubles are written with 17 significant digits, so a
// write/read round-trip is lossless.
std::string panel_to_csv(const ObservationPanel& panel);
ObservationPanel panel_from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace bundlechoice
