#include <radiogather/radiogather.hpp>

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace radiogather;

namespace
{
    TreeError::Kind kind_of(const std::vector<NodeId>& parents, std::optional<std::vector<Label>> labels = std::nullopt)
    {
        try
        {
            build_tree(parents, std::move(labels));
        }
        catch (const TreeError& e)
        {
            return e.kind();
        }
        ADD_FAILURE() << "expected TreeError";
        return TreeError::Kind::MalformedInput;
    }
} // namespace

TEST(Tree, ParentArrayStructure)
{
    // 0 is the root; 1, 2 hang below it; 3 below 1.
    const Tree t = build_tree({0, 0, 0, 1}, std::vector<Label>{2, 0, 3, 1});
    EXPECT_EQ(t.size(), 4);
    EXPECT_EQ(t.root(), 0);
    EXPECT_EQ(t.parent(3), 1);
    EXPECT_EQ(t.depth(3), 2);
    EXPECT_EQ(t.max_depth(), 2);
    EXPECT_EQ(t.node_of_label(1), 3);
    EXPECT_EQ(t.label(0), 2);
    EXPECT_TRUE(t.is_leaf(2));
    EXPECT_FALSE(t.is_leaf(1));
    const auto kids = t.children(0);
    EXPECT_EQ(std::set<NodeId>(kids.begin(), kids.end()), (std::set<NodeId>{1, 2}));
}

TEST(Tree, MinusOneMarksTheRoot)
{
    const Tree t = build_tree({1, -1, 1});
    EXPECT_EQ(t.root(), 1);
    EXPECT_EQ(t.parent(1), 1);
}

TEST(Tree, BottomUpPutsChildrenFirst)
{
    const Tree t = make_random_tree(200, 7);
    std::vector<int> pos(200);
    for (std::size_t i = 0; i < t.bottom_up().size(); ++i) pos[static_cast<std::size_t>(t.bottom_up()[i])] = static_cast<int>(i);
    for (NodeId v = 0; v < 200; ++v)
    {
        if (!t.is_root(v)) { EXPECT_LT(pos[static_cast<std::size_t>(v)], pos[static_cast<std::size_t>(t.parent(v))]); }
    }
}

TEST(Tree, RejectsMalformedInput)
{
    EXPECT_EQ(kind_of({}), TreeError::Kind::EmptyTree);
    EXPECT_EQ(kind_of({0, 1}), TreeError::Kind::MultipleRoots);
    EXPECT_EQ(kind_of({1, 0}), TreeError::Kind::CycleDetected);
    EXPECT_EQ(kind_of({0, 2, 3, 1}), TreeError::Kind::CycleDetected);
    EXPECT_EQ(kind_of({0, 5}), TreeError::Kind::UnreachableNode);
    EXPECT_EQ(kind_of({0, 0}, std::vector<Label>{1, 1}), TreeError::Kind::LabelsNotBijective);
    EXPECT_EQ(kind_of({0, 0}, std::vector<Label>{0}), TreeError::Kind::LabelsNotBijective);
    EXPECT_EQ(kind_of({0, 0}, std::vector<Label>{0, 2}), TreeError::Kind::LabelsNotBijective);
}

TEST(Tree, GeneratedLabelsArePermutations)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const Tree t = build_tree(make_random_tree(37, seed).parents(), std::nullopt, seed);
        std::set<Label> seen(t.labels().begin(), t.labels().end());
        EXPECT_EQ(seen.size(), 37u);
        EXPECT_EQ(*seen.begin(), 0);
        EXPECT_EQ(*seen.rbegin(), 36);
    }
}

TEST(Tree, TextRoundTrip)
{
    const Tree t = shuffle_labels(make_random_tree(25, 3), 11);
    std::stringstream ss;
    write_tree_text(ss, t);
    EXPECT_EQ(read_tree_text(ss), t);
}

TEST(Tree, TextRejectsTruncation)
{
    std::stringstream ss("3\n0\n0\n0\n0\n1\n");
    EXPECT_THROW(read_tree_text(ss), TreeError);
    std::stringstream bad("x");
    EXPECT_THROW(read_tree_text(bad), TreeError);
}

TEST(RumorSet, InsertMergeSubset)
{
    RumorSet a(130);
    RumorSet b(130);
    EXPECT_TRUE(a.insert(3));
    EXPECT_FALSE(a.insert(3));
    a.insert(129);
    b.insert(64);
    b.insert(3);
    EXPECT_FALSE(b.is_subset_of(a));
    EXPECT_EQ(a.merge(b), 1);
    EXPECT_TRUE(b.is_subset_of(a));
    EXPECT_EQ(a.to_vector(), (std::vector<Rumor>{3, 64, 129}));
}

TEST(Random, DerivedSeedsDifferPerKey)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(42, k));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(42, 5), derive_seed(42, 5));
    EXPECT_NE(derive_seed(42, 1, 2), derive_seed(42, 2, 1));
}
