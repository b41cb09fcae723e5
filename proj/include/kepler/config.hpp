#pragma once

#include <map>
#include <string>

namespace kepler {

/// Run configuration. Every tolerance used by the toolkit is a named key
/// here; values load from a flat "key = value" text file and individual
/// command-line flags override them.
struct Config {
    // Geometry admission tolerance: minimum pair distance 2 - tol_geom,
    // lattice membership, the upper edge of the distinguished-edge window.
    double tol_geom = 1e-12;
    // Half-width added to each Voronoi vertex coordinate before interval
    // volume evaluation.
    double inflate_halfwidth = 1e-11;
    // Vertex feasibility / merge / face-membership tolerance in the
    // half-space intersection.
    double vertex_tol = 1e-9;
    // Neighbor cutoff for Voronoi cells.
    double cutoff = 6.0;
    // Safety margin in the interior certificate: vertices must stay within
    // cutoff/2 - interior_margin of the anchor.
    double interior_margin = 0.1;
    // Prover defaults.
    double slack = 1e-9;
    int max_depth = 48;
    long max_leaves = 100000;

    /// Parse a flat key = value file ('#' starts a comment). Unknown keys
    /// are rejected. Throws std::runtime_error with the offending line.
    static Config load(const std::string& path);
    void apply(const std::map<std::string, std::string>& kv);
};

} // namespace kepler
