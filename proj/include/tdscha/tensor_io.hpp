#pragma once

#include "tdscha/pes.hpp"

#include <string>

namespace tdscha {

// On-disk surface description.  The text layout is
//
//   format tdscha-pes 1
//   dim 3
//   basis cartesian
//   unit energy eV
//   unit length angstrom_sqrt_amu
//   hbar 0.0646542
//   v_ref 0.0
//   order 2
//   0 0 1.0e-3
//   end
//   order 4
//   0 0 0 0 2.1e-3
//   end
//
// Indices are zero based and each line carries the symmetric element once;
// duplicate multi-indices are rejected.  A JSON file with the same fields
// (phi/chi/psi as [i, j, ..., value] rows) is accepted interchangeably and
// detected by a leading '{'.
struct PesFile {
    QuarticPES pes;
    double hbar = 0.0; // 0 when the file does not declare it
    std::string energy_unit = "eV";
    std::string length_unit = "angstrom_sqrt_amu";
};

PesFile load_pes(const std::string& path);
void save_pes(const PesFile& file, const std::string& path);
void save_pes_json(const PesFile& file, const std::string& path);

} // namespace tdscha
