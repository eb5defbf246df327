#ifndef BMF_REPORT_HPP_
#define BMF_REPORT_HPP_

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bmf/binmat.hpp"
#include "bmf/colgen.hpp"
#include "bmf/mipsolve.hpp"

namespace bmf {

// {"A": n bit strings of length k, "B": k bit strings of length m,
//  "error": e}.
nlohmann::json factorisation_json(const Factorisation& f, std::size_t n,
                                  std::size_t m, std::uint64_t error);
// Reads the "A"/"B" arrays back into columns (empty factors are skipped).
Factorisation factorisation_from_json(const nlohmann::json& j);

nlohmann::json cg_report_json(const CgReport& report);

// elapsed_secs,z_rmlp,bound with an empty bound where none was emitted.
void write_trace_csv(std::ostream& out, const CgReport& report);

nlohmann::json mip_result_json(const MipResult& r);

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace bmf

#endif  // BMF_REPORT_HPP_
