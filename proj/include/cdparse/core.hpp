#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdparse {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class Errc {
    UnknownForm,
    SyntaxError,
    UndeclaredSymbol,
    BadReliability,
    NonlocalFormula,
    MissingParam,
    EmptyDomain,
    Inconsistent,
    MalformedTree,
    TooLarge,
    DuplicateId,
    UnsortedEvents,
    ModeMismatch,
    DomainError,
    NoAmbiguousNode,
    NoApplicableConstraint,
    IoError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

// ---------------------------------------------------------------------------
// Node and value model
// ---------------------------------------------------------------------------

using NodeId = int;
inline constexpr NodeId kNilNode = -1;  // head of the topmost node

enum class Mode { String, Lattice };

struct TimeInterval {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;

    bool valid() const { return start_ms >= 0 && start_ms < end_ms; }
};

// One word form (string mode) or one recognizer hypothesis (lattice mode).
struct WordNode {
    NodeId id = 0;           // dense internal index
    std::int64_t ext_id = 0; // surface position (string) or file id (lattice)
    std::string form;
    int category = 0;   // index into Grammar::categories
    int position = 0;   // 1-based surface position; 0 in lattice mode
    std::optional<TimeInterval> interval;  // lattice mode only
    double confidence = 1.0;
    bool late = false;  // lattice: arrived behind the emitted frontier
};

// A candidate (head, label) pair: the value type of the constraint problem.
struct ModValue {
    NodeId head = kNilNode;  // kNilNode together with the root label
    int label = 0;           // index into Grammar::labels

    friend bool operator==(const ModValue&, const ModValue&) = default;
    friend auto operator<=>(const ModValue&, const ModValue&) = default;
};

struct DeletionRecord {
    std::int64_t step = 0;  // 1-based, strictly increasing per network
    NodeId node = 0;
    ModValue value;
    std::string constraint_id;
    double reliability = 1.0;
};

enum class Status { Unique, Ambiguous, Inconsistent };

const char* status_name(Status s);

// ---------------------------------------------------------------------------
// Constraint network
// ---------------------------------------------------------------------------

// Nodes plus their current candidate domains and the deletion log. Single
// owner mutates it; values themselves are immutable.
class ConstraintNetwork {
public:
    ConstraintNetwork() = default;
    explicit ConstraintNetwork(Mode mode) : mode_(mode) {}

    Mode mode() const { return mode_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<WordNode>& nodes() const { return nodes_; }
    const WordNode& node(NodeId id) const { return nodes_.at(static_cast<size_t>(id)); }

    // Appends a node with an empty domain; id must equal node_count().
    void add_node(WordNode n);

    const std::vector<ModValue>& domain(NodeId id) const { return domains_.at(static_cast<size_t>(id)); }
    int initial_size(NodeId id) const { return initial_sizes_.at(static_cast<size_t>(id)); }

    // Licensing / extension: installs values and bumps the initial size.
    void admit_value(NodeId id, ModValue v);

    bool contains(NodeId id, const ModValue& v) const;

    // Removes a value and appends a deletion record. Returns false when the
    // value was already gone.
    bool erase_value(NodeId id, const ModValue& v, const std::string& constraint_id,
                     double reliability);

    const std::vector<DeletionRecord>& deletion_log() const { return log_; }
    std::int64_t step_counter() const { return static_cast<std::int64_t>(log_.size()); }

    bool emitted(NodeId id) const { return emitted_.at(static_cast<size_t>(id)); }
    void mark_emitted(NodeId id);
    std::int64_t emitted_frontier_ms() const { return emitted_frontier_ms_; }

    std::vector<NodeId> empty_nodes() const;

private:
    Mode mode_ = Mode::String;
    std::vector<WordNode> nodes_;
    std::vector<std::vector<ModValue>> domains_;  // kept sorted (head, label)
    std::vector<int> initial_sizes_;
    std::vector<bool> emitted_;
    std::vector<DeletionRecord> log_;
    std::int64_t emitted_frontier_ms_ = 0;
};

Status check_status(const ConstraintNetwork& net);

// ---------------------------------------------------------------------------
// Extracted analyses
// ---------------------------------------------------------------------------

struct ResolvedNode {
    NodeId node = 0;
    ModValue value;
};

struct UnresolvedNode {
    NodeId node = 0;
    std::vector<ModValue> domain;
};

struct DependencyAnalysis {
    bool complete = false;
    std::vector<ResolvedNode> resolved;      // singleton-domain nodes
    std::vector<UnresolvedNode> unresolved;  // remaining candidates per node
};

// Callable at any time. Ambiguous networks yield a partial analysis; raises
// Inconsistent on an empty domain and MalformedTree when an all-singleton
// network is not a tree (cycle or root count != 1).
DependencyAnalysis extract_solution(const ConstraintNetwork& net);

}  // namespace cdparse
