// admmloc: typed error conditions thrown by the library.
#pragma once

#include <stdexcept>
#include <string>

namespace admmloc {

/** Base class for every error raised by this library. */
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Graph construction: the node set is not connected. */
struct DisconnectedGraph : Error {
    explicit DisconnectedGraph(const std::string& what) : Error(what) {}
};

/** Graph construction: at least one anchor node is required. */
struct NoAnchor : Error {
    explicit NoAnchor(const std::string& what) : Error(what) {}
};

/** Graph construction: an edge connects a node to itself. */
struct SelfLoop : Error {
    explicit SelfLoop(const std::string& what) : Error(what) {}
};

/** Graph construction: the same undirected edge appears twice. */
struct DuplicateEdge : Error {
    explicit DuplicateEdge(const std::string& what) : Error(what) {}
};

/** Synthetic generation: no connected layout found within the retry cap. */
struct CannotConnect : Error {
    explicit CannotConnect(const std::string& what) : Error(what) {}
};

/** Solver: a combine step is missing the message from one neighbor. */
struct MissingMessage : Error {
    explicit MissingMessage(int neighbor, const std::string& what)
        : Error(what), neighbor_id(neighbor) {}
    int neighbor_id;
};

/** Diagnostics: a metric needs ground truth the scenario does not carry. */
struct NoGroundTruth : Error {
    explicit NoGroundTruth(const std::string& what) : Error(what) {}
};

/** Diagnostics: sensor RMSE is undefined when every node is an anchor. */
struct AllAnchors : Error {
    explicit AllAnchors(const std::string& what) : Error(what) {}
};

/** Diagnostics: an auxiliary direction block lies outside the unit ball. */
struct InfeasibleW : Error {
    explicit InfeasibleW(const std::string& what) : Error(what) {}
};

/** Dense reference: a linear system is numerically singular. */
struct SingularSystem : Error {
    explicit SingularSystem(const std::string& what) : Error(what) {}
};

/** Serialization: malformed input (carries a location hint). */
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

/** Serialization: well-formed input violating a model invariant. */
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

}  // namespace admmloc
