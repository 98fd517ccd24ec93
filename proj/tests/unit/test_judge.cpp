#include <doctest.h>

#include <random>

#include "codebench/common/errors.hpp"
#include "codebench/common/hash.hpp"
#include "codebench/judge/canned.hpp"
#include "codebench/judge/protocol.hpp"
#include "codebench/judge/shim.hpp"
#include "codebench/judge/verdict.hpp"
#include "codebench/repair/imports.hpp"
#include "support.hpp"

using namespace codebench;
using namespace codebench::judge;
namespace proto = codebench::judge::protocol;

namespace {

corpus::Problem two_sum() {
  corpus::Problem p;
  p.slug = "two-sum";
  p.title = "Two Sum";
  p.description = "Return indices of the two numbers adding up to target.";
  p.code_framework = "class Solution:\n    def twoSum(self, nums: List[int], target: int) -> List[int]:\n        ";
  p.test_cases = {{"[2,7,11,15]\n9\n", "[0,1]\n"}, {"[3,2,4]\n6\n", "[1,2]\n"}, {"[3,3]\n6\n", "[0,1]\n"}};
  return p;
}

const char* kTwoSum = R"(from typing import List

class Solution:
    def twoSum(self, nums: List[int], target: int) -> List[int]:
        seen = {}
        for i, x in enumerate(nums):
            if target - x in seen:
                return [seen[target - x], i]
            seen[x] = i
        return []
)";

const char* kReversed = R"(class Solution:
    def twoSum(self, nums, target):
        for i in range(len(nums)):
            for j in range(i + 1, len(nums)):
                if nums[i] + nums[j] == target:
                    return [j, i]
)";

proto::RunReply ok(std::string result, double wall = 1, double peak = 1) {
  proto::RunReply r;
  r.result = std::move(result);
  r.wall_ms = wall;
  r.peak_mb = peak;
  return r;
}

#ifdef CODEBENCH_PYTHON
std::vector<std::string> shim_command(const std::string& mode = "") {
  std::vector<std::string> argv{CODEBENCH_PYTHON, (testsupport::kFixtures / "judge" / "fixture_shim.py").string()};
  if (!mode.empty()) argv.push_back(mode);
  return argv;
}
#endif

}  // namespace

TEST_CASE("verdict status names and json round trip") {
  for (auto s : {Status::Accepted, Status::WrongAnswer, Status::RuntimeError, Status::TimeLimitExceeded,
                 Status::MemoryLimitExceeded})
    CHECK(status_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(status_from_string("Compile Error"), InvalidArgument);
  Verdict v{Status::WrongAnswer, 5, 2, "Wrong Answer on test 3", 12.5, 3.25};
  CHECK(nlohmann::json(v).get<Verdict>() == v);
}

TEST_CASE("percentile rank counts strictly worse values") {
  CHECK(percentile_rank(55, {40, 60, 70}) == doctest::Approx(66.6667).epsilon(1e-4));
  CHECK(percentile_rank(100, {40, 60, 70}) == 0);
  CHECK(percentile_rank(1, {40, 60, 70}) == 100);
  CHECK(percentile_rank(60, {40, 60, 70}) == doctest::Approx(100.0 / 3));
  // a rank of 60 means faster than 60% of the population
  CHECK(percentile_rank(5, {1, 2, 3, 4, 6, 7, 8, 9, 10, 11}) == 60);
  CHECK_THROWS_AS(percentile_rank(1, {}), EmptyPopulation);
}

TEST_CASE("percentile rank is antitone and bounded") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pop(1 + rng() % 30);
    for (auto& p : pop) p = rng() % 50;
    double a = rng() % 60, b = rng() % 60;
    if (a > b) std::swap(a, b);
    double ra = percentile_rank(a, pop), rb = percentile_rank(b, pop);
    CHECK(ra >= rb);
    CHECK(ra >= 0);
    CHECK(ra <= 100);
  }
}

TEST_CASE("rank_verdict ranks against accepted verdicts only") {
  std::vector<Verdict> pop = {{Status::Accepted, 1, 1, "", 40, 10},
                              {Status::Accepted, 1, 1, "", 60, 20},
                              {Status::Accepted, 1, 1, "", 70, 30},
                              {Status::WrongAnswer, 1, 0, "x", 1000, 1000}};
  RankPair r = rank_verdict({Status::Accepted, 1, 1, "", 55, 25}, pop);
  CHECK(r.population_size == 3);
  CHECK(r.runtime_rank == doctest::Approx(200.0 / 3));
  CHECK(r.memory_rank == doctest::Approx(100.0 / 3));
  CHECK_THROWS_AS(rank_verdict(pop[0], {pop[3]}), EmptyPopulation);
}

TEST_CASE("entry point from the code framework") {
  CHECK(entry_point(two_sum().code_framework) == "Solution.twoSum");
  CHECK(entry_point("def solve(x):\n    pass\n") == "solve");
  CHECK(entry_point("# Definition\nclass ListNode:\n    pass\nclass Solution:\n    def merge(self, a):\n") ==
        "ListNode.merge");
  CHECK_THROWS_AS(entry_point("class Solution:\n    pass\n"), MissingFramework);
}

TEST_CASE("frames round trip arbitrary bytes in arbitrary chunks") {
  std::mt19937 rng(1234);
  std::vector<std::string> sent;
  std::string wire;
  for (int i = 0; i < 1000; ++i) {
    std::string payload(rng() % 300, '\0');
    for (auto& c : payload) c = static_cast<char>(rng() % 256);
    sent.push_back(payload);
    wire += proto::encode_frame(payload);
  }
  proto::FrameDecoder dec;
  std::vector<std::string> got;
  for (std::size_t pos = 0; pos < wire.size();) {
    std::size_t n = std::min<std::size_t>(1 + rng() % 700, wire.size() - pos);
    dec.feed(std::string_view(wire).substr(pos, n));
    pos += n;
    while (auto f = dec.next()) got.push_back(*f);
  }
  CHECK(got == sent);
  CHECK(dec.idle());
}

TEST_CASE("malformed frames are protocol errors") {
  proto::FrameDecoder a;
  CHECK_THROWS_AS(a.feed("12x\nabc"), ProtocolError);
  proto::FrameDecoder b;
  CHECK_THROWS_AS(b.feed("\n"), ProtocolError);
  proto::FrameDecoder c;
  CHECK_THROWS_AS(c.feed("999999999999\n"), ProtocolError);
  proto::FrameDecoder d;
  CHECK_THROWS_AS(d.feed(std::string(40, '1')), ProtocolError);
  proto::FrameDecoder e;
  e.feed("5\nab");
  CHECK_FALSE(e.next());
  e.feed("cde0\n");
  CHECK(e.next() == "abcde");
  CHECK(e.next() == "");
}

TEST_CASE("request and reply payloads round trip") {
  proto::RunRequest req{"class Solution: pass\n", "Solution.f", "[1]\n2\n", 250, 64};
  CHECK(proto::decode_request(proto::encode(req)) == req);
  proto::RunReply rep{proto::Outcome::Exception, "", "Traceback ...\nZeroDivisionError", 3.5, 1.25};
  CHECK(proto::decode_reply(proto::encode(rep)) == rep);
  CHECK(proto::encode(req) == proto::encode(proto::decode_request(proto::encode(req))));
  CHECK_THROWS_AS(proto::decode_reply("ERR 2"), ProtocolError);
  CHECK_THROWS_AS(proto::decode_reply("[1,2]"), ProtocolError);
  CHECK_THROWS_AS(proto::decode_reply(R"({"outcome":"Maybe"})"), ProtocolError);
  CHECK_THROWS_AS(proto::decode_request(R"({"solution":"x"})"), ProtocolError);
}

TEST_CASE("replies fold into a verdict") {
  auto p = two_sum();
  Limits lim{1000, 256};

  Verdict all = fold_replies(p, {ok("[0,1]", 5, 2), ok("[1,2]  \n", 9, 1), ok("[0,1]", 7, 4)}, lim);
  CHECK(all.status == Status::Accepted);
  CHECK(all.tests_passed == 3);
  CHECK(all.runtime_ms == 9);
  CHECK(all.peak_memory_mb == 4);
  CHECK(all.error_info.empty());

  Verdict wa = fold_replies(p, {ok("[0,1]"), ok("[2,1]")}, lim);
  CHECK(wa.status == Status::WrongAnswer);
  CHECK(wa.tests_passed == 1);
  CHECK(wa.error_info.find("test 2") != std::string::npos);
  CHECK(wa.error_info.find("Expected:\n[1,2]") != std::string::npos);
  CHECK(wa.error_info.find("Output:\n[2,1]") != std::string::npos);

  proto::RunReply to;
  to.outcome = proto::Outcome::Timeout;
  to.wall_ms = 1500;
  Verdict tle = fold_replies(p, {to}, lim);
  CHECK(tle.status == Status::TimeLimitExceeded);
  CHECK(tle.tests_passed == 0);
  CHECK(tle.runtime_ms >= 1000);

  Verdict slow = fold_replies(p, {ok("[0,1]", 1200)}, lim);
  CHECK(slow.status == Status::TimeLimitExceeded);

  proto::RunReply ex;
  ex.outcome = proto::Outcome::Exception;
  ex.trace = "ZeroDivisionError: division by zero";
  Verdict re = fold_replies(p, {ok("[0,1]"), ok("[1,2]"), ex}, lim);
  CHECK(re.status == Status::RuntimeError);
  CHECK(re.tests_passed == 2);
  CHECK(re.error_info.find("ZeroDivisionError") != std::string::npos);

  proto::RunReply mem;
  mem.outcome = proto::Outcome::MemoryExceeded;
  CHECK(fold_replies(p, {mem}, lim).status == Status::MemoryLimitExceeded);
  CHECK(fold_replies(p, {ok("[0,1]", 1, 300)}, lim).status == Status::MemoryLimitExceeded);
}

TEST_CASE("folded verdicts satisfy the verdict invariants") {
  std::mt19937 rng(77);
  auto p = two_sum();
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<proto::RunReply> replies;
    int fail_at = static_cast<int>(rng() % 4);
    for (int i = 0; i < 3; ++i) {
      if (i == fail_at) {
        proto::RunReply r;
        r.outcome = static_cast<proto::Outcome>(rng() % 4);
        if (r.outcome == proto::Outcome::Ok) r.result = "wrong";
        r.wall_ms = rng() % 2000;
        replies.push_back(r);
        break;
      }
      replies.push_back(ok(p.test_cases[i].expected, rng() % 900, rng() % 100));
    }
    Verdict v = fold_replies(p, replies, {1000, 256});
    CHECK(v.accepted() == (v.tests_passed == v.tests_total));
    CHECK(v.runtime_ms >= 0);
    CHECK(v.peak_memory_mb >= 0);
    if (!v.accepted()) {
      CHECK(v.tests_passed == fail_at);
      CHECK_FALSE(v.error_info.empty());
    }
  }
}

TEST_CASE("canned judge flags missing imports and accepts repaired code") {
  auto p = two_sum();
  p.code_framework = "class Solution:\n    def groupAnagrams(self, strs: List[str]) -> List[List[str]]:\n";
  std::string source =
      "class Solution:\n"
      "    def groupAnagrams(self, strs: List[str]) -> List[List[str]]:\n"
      "        groups = defaultdict(list)\n"
      "        for s in strs:\n"
      "            groups[''.join(sorted(s))].append(s)\n"
      "        return list(groups.values())\n";
  CannedJudge judge;
  Verdict before = judge.submit(source, p, {});
  CHECK(before.status == Status::RuntimeError);
  CHECK(before.error_info == "NameError: name 'List' is not defined");
  CHECK(before.tests_passed == 0);

  Verdict after = judge.submit(imports::repair(source), p, {});
  CHECK(after.status == Status::Accepted);
  CHECK(after.tests_passed == 3);
  CHECK(after.runtime_ms > 0);
  CHECK(after == judge.submit(imports::repair(source), p, {}));
}

TEST_CASE("canned judge static checks and overrides") {
  auto p = two_sum();
  CannedJudge judge;
  CHECK(judge.submit(kTwoSum, p, {}).status == Status::Accepted);

  Verdict syntax = judge.submit("class Solution:\n    def twoSum(self, nums, target):\n        return 'x\n", p, {});
  CHECK(syntax.status == Status::RuntimeError);
  CHECK(syntax.error_info.rfind("SyntaxError", 0) == 0);

  Verdict missing = judge.submit("class Solution:\n    def threeSum(self, nums):\n        return []\n", p, {});
  CHECK(missing.status == Status::RuntimeError);
  CHECK(missing.error_info.find("Solution.twoSum") != std::string::npos);

  Verdict forced = judge.submit(std::string(kTwoSum) + "# judge: WrongAnswer 2\n", p, {});
  CHECK(forced.status == Status::WrongAnswer);
  CHECK(forced.tests_passed == 2);
  CHECK(forced.error_info == "WrongAnswer on test 3");

  Verdict tle = judge.submit(std::string(kTwoSum) + "    # judge: TimeLimitExceeded\n", p, {});
  CHECK(tle.status == Status::TimeLimitExceeded);
  CHECK(tle.tests_passed == 0);

  Verdict canned{Status::MemoryLimitExceeded, 3, 1, "Memory Limit Exceeded on test 2", 10, 600};
  judge.add(kReversed, canned);
  CHECK(judge.submit(kReversed, p, {}) == canned);

  CannedJudge other;
  other.load({{"verdicts", {{sha256_hex(kReversed), canned}}}});
  CHECK(other.submit(kReversed, p, {}) == canned);
}

TEST_CASE("canned cost model grows with code size") {
  auto p = two_sum();
  CannedJudge judge;
  Verdict small = judge.submit(kTwoSum, p, {});
  std::string bigger = std::string(kTwoSum) + "\n\ndef helper(x):\n    if x:\n        return 1\n    return 2\n";
  Verdict big = judge.submit(bigger, p, {});
  CHECK(big.runtime_ms > small.runtime_ms);
  CHECK(big.peak_memory_mb > small.peak_memory_mb);
  // 9 code lines, complexity 3 (loop 1, nested if 2)
  CHECK(small.runtime_ms == doctest::Approx(20 + 1.5 * 9 + 4 * 3));
}

TEST_CASE("judge_all keeps submission order across workers") {
  auto p = two_sum();
  CannedJudge judge;
  std::vector<Submission> subs;
  for (int i = 0; i < 40; ++i) {
    std::string s = std::string(kTwoSum);
    for (int k = 0; k < i % 7; ++k) s += "x" + std::to_string(k) + " = " + std::to_string(k) + "\n";
    if (i % 5 == 0) s += "# judge: WrongAnswer 1\n";
    subs.push_back({"s" + std::to_string(i), s, &p});
  }
  auto one = judge_all(judge, subs, {}, 1);
  auto four = judge_all(judge, subs, {}, 4);
  CHECK(one == four);
  CHECK(one[0].status == Status::WrongAnswer);
  CHECK(one[1].status == Status::Accepted);
  CHECK_THROWS_AS(judge_all(judge, subs, {}, 0), InvalidArgument);
}

#ifdef CODEBENCH_PYTHON
TEST_CASE("shim judge runs solutions through a runner process") {
  auto p = two_sum();
  ShimJudge judge(shim_command());
  Verdict good = judge.submit(kTwoSum, p, {5000, 256});
  CHECK(good.status == Status::Accepted);
  CHECK(good.tests_passed == 3);
  CHECK(good.tests_total == 3);

  Verdict wrong = judge.submit(kReversed, p, {5000, 256});
  CHECK(wrong.status == Status::WrongAnswer);
  CHECK(wrong.tests_passed == 0);
  CHECK(wrong.error_info.find("Expected:\n[0,1]") != std::string::npos);
  CHECK(wrong.error_info.find("Output:\n[1,0]") != std::string::npos);

  Verdict boom = judge.submit("class Solution:\n    def twoSum(self, nums, target):\n        return 1 // 0\n", p,
                              {5000, 256});
  CHECK(boom.status == Status::RuntimeError);
  CHECK(boom.error_info.find("ZeroDivisionError") != std::string::npos);

  for (int i = 0; i < 3; ++i) {
    Verdict again = judge.submit(kReversed, p, {5000, 256});
    CHECK(again.status == wrong.status);
    CHECK(again.tests_passed == wrong.tests_passed);
  }
}

TEST_CASE("shim judge kills a runaway solution") {
  auto p = two_sum();
  ShimJudge judge(shim_command());
  Verdict v = judge.submit("class Solution:\n    def twoSum(self, nums, target):\n        while True:\n            pass\n",
                           p, {300, 256});
  CHECK(v.status == Status::TimeLimitExceeded);
  CHECK(v.runtime_ms >= 300);
  CHECK(v.tests_passed == 0);
  // the runner restarts for the next submission
  CHECK(judge.submit(kTwoSum, p, {5000, 256}).status == Status::Accepted);
}

TEST_CASE("runner failures surface as errors") {
  auto p = two_sum();
  ShimJudge bad_hello(shim_command("--bad-hello"));
  CHECK_THROWS_AS(bad_hello.submit(kTwoSum, p, {}), RunnerUnavailable);
  ShimJudge missing({"/nonexistent/runner"});
  CHECK_THROWS_AS(missing.submit(kTwoSum, p, {}), RunnerUnavailable);
  ShimJudge garbage(shim_command("--garbage"));
  CHECK_THROWS_AS(garbage.submit(kTwoSum, p, {1000, 256}), ProtocolError);
}

TEST_CASE("shim judge pool merges results in submission order") {
  auto p = two_sum();
  ShimJudge judge(shim_command(), 3);
  std::vector<Submission> subs;
  for (int i = 0; i < 9; ++i) subs.push_back({"s" + std::to_string(i), i % 3 ? kTwoSum : kReversed, &p});
  auto out = judge_all(judge, subs, {5000, 256}, 3);
  for (int i = 0; i < 9; ++i) CHECK(out[i].status == (i % 3 ? Status::Accepted : Status::WrongAnswer));
}
#endif
