#pragma once

// Frozen reference programs used across the test suite. These strings are the
// exact surfaces the engine must parse, render, store and replay; tests treat
// them as ground truth and never regenerate them from the implementation.

#include <string>
#include <vector>

namespace fixtures {

// Two canonical stored-memory records: environment, instruction, code.
inline const std::string kPanEnv = "RLBench";
inline const std::string kPanQuery = "leave the pan open.";
inline const std::string kPanCode =
    "objects = ['saucepan', 'saucepan_lid']\n"
    "# Query: leave the pan open.\n"
    "composer(\"grasp the saucepan_lid\")\n"
    "composer(\"move away from the saucepan by 25cm\")\n"
    "composer(\"open gripper\")\n"
    "composer(\"back to default pose\")\n"
    "# done\n";

inline const std::string kRubbishEnv = "RLBench";
inline const std::string kRubbishQuery = "chuck way any rubbish on the table rubbish.";
inline const std::string kRubbishCode =
    "objects = ['bin', 'rubbish', 'tomato1', 'tomato2']\n"
    "# Query: chuck way any rubbish on the table rubbish.\n"
    "composer(\"grasp the rubbish\")\n"
    "composer(\"back to default pose\")\n"
    "composer(\"move to the top of the bin\")\n"
    "composer(\"open gripper\")\n"
    "# done\n";

// Contrasting plan pairs for four real-robot tasks: a naive single-shot plan
// and the memory-informed plan that replaced it. Step lists only; tests wrap
// them into full program text where needed.
inline const std::vector<std::string> kRotateBoxNaive = {
    "grasp the red box",
    "back to default pose",
    "rotate the gripper to the left",
    "back to default pose",
};
inline const std::vector<std::string> kRotateBoxInformed = {
    "back to default pose",
    "grasp the red box",
    "turn counterclockwise by 90 degrees",
    "open gripper",
    "back to default pose",
};

inline const std::vector<std::string> kPushTapeNaive = {
    "push the circular tape to the left",
    "back to default pose",
};
inline const std::vector<std::string> kPushTapeInformed = {
    "back to default pose",
    "grasp the circular tape",
    "move 5cm right from the gripper",
    "open gripper",
    "back to default pose",
};

inline const std::vector<std::string> kRemoveLidNaive = {
    "grasp the lid",
    "back to default pose",
    "move to 5cm above the cup",
    "open gripper",
    "back to default pose",
};
inline const std::vector<std::string> kRemoveLidInformed = {
    "grasp the lid",
    "move gripper 10cm up",
    "back to default pose",
};

inline const std::vector<std::string> kPushButtonNaive = {
    "move to the center of the red button",
    "close the gripper",
    "back to default pose",
};
inline const std::vector<std::string> kPushButtonInformed = {
    "back to default pose",
    "close gripper",
    "move 5cm up from the red button",
    "move 5cm down from the red button",
    "back to default pose",
    "open gripper",
};

inline std::vector<std::vector<std::string>> all_plan_pairs() {
  return {kRotateBoxNaive,  kRotateBoxInformed, kPushTapeNaive,   kPushTapeInformed,
          kRemoveLidNaive,  kRemoveLidInformed, kPushButtonNaive, kPushButtonInformed};
}

// Wraps bare steps into canonical program text.
inline std::string as_program(const std::vector<std::string>& steps) {
  std::string out;
  for (const auto& s : steps) out += "composer(\"" + s + "\")\n";
  return out;
}

}  // namespace fixtures
