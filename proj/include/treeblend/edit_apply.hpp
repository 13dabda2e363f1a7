#pragma once

#include <vector>

#include "treeblend/edit_distance.hpp"
#include "treeblend/tree.hpp"

namespace treeblend {

// Materializes the tree reached after applying a subset of a script's ops,
// declaratively rather than by mutating step to step, so any op order yields
// one well-defined result:
//
//   present  = source nodes without an applied delete, plus applied inserts
//   labels   = target labels where an update is applied, source labels otherwise
//   parents  = for a surviving source node, its nearest surviving source
//              ancestor, unless the node is mapped and an applied insert sits
//              between its target image and the target image of that ancestor,
//              in which case the insert (the deepest applied one) takes over;
//              for an inserted node, the nearest target ancestor that is
//              either an applied insert or mapped back to a surviving source
//              node
//
// Applying every op reproduces the target up to node ids; applying none
// reproduces the source. Intermediate subsets can produce forests (e.g. the
// source root deleted before a replacement root arrives); callers decide
// validity with validate(). Node ids are prefixed "s_" (source identity) or
// "t_" (inserted) so the two id spaces cannot collide.
//
// `applied` is indexed parallel to script.ops.
RecipeTree materialize(const RecipeTree& source, const RecipeTree& target,
                       const EditScript& script, const std::vector<bool>& applied);

// Convenience: all ops applied.
RecipeTree apply_full(const RecipeTree& source, const RecipeTree& target, const EditScript& script);

// Reorders op indices so that every insert appears only once its target
// parent exists: an insert is ready when its target parent is mapped, already
// applied, or absent (target root). Not-yet-ready ops are deferred, first
// come first served, and drained after each applied op. Deletes and updates
// are always ready. The result is a permutation of `order`.
std::vector<int> repair_order(const std::vector<int>& order, const RecipeTree& target,
                              const EditScript& script);

}  // namespace treeblend
