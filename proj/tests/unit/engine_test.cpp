#include <radiogather/radiogather.hpp>

#include <gtest/gtest.h>

#include <functional>
#include <sstream>

using namespace radiogather;

namespace
{
    using ActFn = std::function<std::optional<Message>(const NodeView&)>;

    class LambdaNode : public NodeProtocol
    {
    public:
        explicit LambdaNode(ActFn f) : f_(std::move(f)) {}
        std::optional<Message> act(const NodeView& v) override { return f_(v); }
        std::unique_ptr<NodeProtocol> clone() const override { return std::make_unique<LambdaNode>(f_); }

    private:
        ActFn f_;
    };

    class LambdaProtocol : public Protocol
    {
    public:
        LambdaProtocol(int n, MessageClass cls, ActFn f) : n_(n), cls_(cls), f_(std::move(f)) {}
        std::string_view id() const override { return "lambda"; }
        MessageClass message_class() const override { return cls_; }
        int node_count() const override { return n_; }
        std::unique_ptr<NodeProtocol> instantiate(const NodeContext&) const override { return std::make_unique<LambdaNode>(f_); }

    private:
        int n_;
        MessageClass cls_;
        ActFn f_;
    };

    // 0 <- 1 <- 2, labels equal node ids.
    Tree small_path() { return make_path(3); }
} // namespace

TEST(Engine, SingleNodeCompletesAtZero)
{
    const auto proto = round_robin_unbounded(1);
    RunOptions opt;
    opt.max_steps = 5;
    const auto trace = run(*proto, make_path(1), opt);
    ASSERT_TRUE(trace.complete());
    EXPECT_EQ(*trace.completion_step, 0);
    EXPECT_EQ(trace.steps_executed, 0);
}

TEST(Engine, RoundRobinUnboundedOnPathByHand)
{
    // Step 1: label 1 sends {1} to the root. Step 2: label 2 sends {2} to node 1.
    // Step 4: label 1 sends {1,2}. Delivery = elapsed steps.
    const auto proto = round_robin_unbounded(3);
    RunOptions opt;
    opt.max_steps = 20;
    opt.record_steps = true;
    const auto trace = run(*proto, small_path(), opt);
    ASSERT_TRUE(trace.complete());
    EXPECT_EQ(trace.delivery[0], 0);
    EXPECT_EQ(trace.delivery[1], 2);
    EXPECT_EQ(trace.delivery[2], 5);
    EXPECT_EQ(*trace.completion_step, 5);
    ASSERT_EQ(trace.steps.size(), 5u);
    EXPECT_TRUE(trace.steps[0].transmitters.empty()); // root's transmission discarded
    EXPECT_EQ(trace.steps[2].transmitters, std::vector<NodeId>{2});
    ASSERT_EQ(trace.steps[2].receptions.size(), 1u);
    EXPECT_EQ(trace.steps[2].receptions[0].first, 1);
}

TEST(Engine, RoundRobinBoundedOnStarByHand)
{
    const auto proto = round_robin_bounded(3);
    RunOptions opt;
    opt.max_steps = 20;
    const auto trace = run(*proto, make_star(3), opt);
    EXPECT_EQ(trace.delivery[1], 2);
    EXPECT_EQ(trace.delivery[2], 3);
    EXPECT_EQ(*trace.completion_step, 3);
    EXPECT_EQ(trace.collisions_total, 0);
}

TEST(Engine, CollisionAndDuplexRules)
{
    const Tree star = make_star(3);
    std::vector<std::optional<Message>> two{std::nullopt, FnfMessage{1}, FnfMessage{2}};
    std::vector<NodeId> coll;
    auto rec = step(star, DuplexMode::Full, two, &coll);
    EXPECT_FALSE(rec[0]);
    EXPECT_EQ(coll, std::vector<NodeId>{0});

    std::vector<std::optional<Message>> one{std::nullopt, FnfMessage{1}, std::nullopt};
    rec = step(star, DuplexMode::Full, one);
    ASSERT_TRUE(rec[0]);
    EXPECT_EQ(std::get<FnfMessage>(*rec[0]).rumor, 1);

    // On the path, node 1 hears node 2 while transmitting only in full duplex.
    const Tree path = small_path();
    std::vector<std::optional<Message>> both{std::nullopt, FnfMessage{1}, FnfMessage{2}};
    rec = step(path, DuplexMode::Full, both);
    ASSERT_TRUE(rec[1]);
    EXPECT_EQ(std::get<FnfMessage>(*rec[1]).rumor, 2);
    ASSERT_TRUE(rec[0]);
    rec = step(path, DuplexMode::Half, both);
    EXPECT_FALSE(rec[1]);
    EXPECT_TRUE(rec[0]);
    EXPECT_THROW(step(path, DuplexMode::Full, std::vector<std::optional<Message>>(2)), std::invalid_argument);
}

TEST(Engine, RejectsWiderMessagesThanDeclared)
{
    LambdaProtocol proto(3, MessageClass::Bounded, [](const NodeView& v) -> std::optional<Message> {
        auto s = std::make_shared<RumorSet>(v.n);
        s->insert(v.label);
        return UnboundedMessage{s, Aux{}};
    });
    RunOptions opt;
    opt.max_steps = 3;
    try
    {
        run(proto, small_path(), opt);
        FAIL() << "expected ProtocolViolation";
    }
    catch (const ProtocolViolation& e)
    {
        EXPECT_EQ(e.kind(), ProtocolViolation::Kind::MessageBound);
    }
}

TEST(Engine, RejectsFireAndForwardOfUnheldRumor)
{
    LambdaProtocol proto(3, MessageClass::FireAndForward,
                         [](const NodeView& v) -> std::optional<Message> { return FnfMessage{(v.label + 1) % v.n}; });
    RunOptions opt;
    opt.max_steps = 3;
    try
    {
        run(proto, small_path(), opt);
        FAIL() << "expected ProtocolViolation";
    }
    catch (const ProtocolViolation& e)
    {
        EXPECT_EQ(e.kind(), ProtocolViolation::Kind::FireAndForwardRule);
    }
}

TEST(Engine, RejectsMismatchedSizes)
{
    const auto proto = round_robin_unbounded(4);
    RunOptions opt;
    opt.max_steps = 3;
    EXPECT_THROW(run(*proto, small_path(), opt), std::invalid_argument);
    opt.max_steps = 0;
    EXPECT_THROW(run(*round_robin_unbounded(3), small_path(), opt), std::invalid_argument);
}

TEST(Engine, IncompleteRunHasNoCompletion)
{
    const auto proto = round_robin_unbounded(3);
    RunOptions opt;
    opt.max_steps = 3;
    const auto trace = run(*proto, small_path(), opt);
    EXPECT_FALSE(trace.complete());
    EXPECT_EQ(trace.delivered_count(), 2);
    EXPECT_EQ(trace.steps_executed, 3);
}

TEST(Engine, NodesSeeOnlyLabelTimeAndInbox)
{
    // Every view handed out carries the node's own label and rumor and a monotone clock.
    const Tree t = shuffle_labels(make_random_tree(12, 5), 9);
    std::vector<std::int64_t> last(12, -1);
    bool ok = true;
    LambdaProtocol proto(12, MessageClass::FireAndForward, [&](const NodeView& v) -> std::optional<Message> {
        ok = ok && v.own_rumor == v.label && v.n == 12 && v.time == last[static_cast<std::size_t>(v.label)] + 1;
        last[static_cast<std::size_t>(v.label)] = v.time;
        for (const auto& r : v.inbox) ok = ok && r.step < v.time;
        if (v.time % 12 == v.label) return FnfMessage{v.label};
        return std::nullopt;
    });
    RunOptions opt;
    opt.max_steps = 40;
    opt.stop_when_complete = false;
    run(proto, t, opt);
    EXPECT_TRUE(ok);
}

TEST(Engine, TraceJsonlIsDeterministic)
{
    const Tree t = make_family_tree("random", 20, 3);
    auto text = [&] {
        const auto proto = rtree(20);
        RunOptions opt;
        opt.seed = 17;
        opt.max_steps = 2000;
        opt.record_steps = true;
        std::ostringstream os;
        write_trace_jsonl(os, run(*proto, t, opt));
        return os.str();
    };
    const auto a = text();
    EXPECT_EQ(a, text());
    EXPECT_NE(a.find(std::string(trace_schema)), std::string::npos);
}
