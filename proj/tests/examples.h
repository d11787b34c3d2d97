// Copyright 2026 The noisekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOISEKIT_TESTS_EXAMPLES_H_
#define NOISEKIT_TESTS_EXAMPLES_H_

#include <string>
#include <utility>
#include <vector>

namespace noisekit::testing {

inline constexpr char kUniverse[] =
    "The universe has no borders, it is filled with infinite possibilities "
    "from the cosmos.";
inline constexpr char kUniverseWordFlip[] =
    ". cosmos the from possibilities infinite with filled is it , borders no "
    "has universe The";
inline constexpr char kUniverseCharFlip[] =
    ".somsoc eht morf seitilibissop etinifni htiw dellif si ti ,sredrob on sah "
    "esrevinu ehT";

inline constexpr char kDialogueInstruction[] =
    "Given an incomplete dialogue, complete it so that it is relevant to the "
    "topic and creates a pleasant chatbots experience.";
inline constexpr char kDialogueInput[] =
    "- Agent: Hi, how can I help you today?\n- Customer:";
inline constexpr char kDialogueAnswer[] =
    "Hey, I was wondering if you could help me with my recent order. Could "
    "you provide me with an update on it?";
inline constexpr char kDialogueWordFlip[] =
    "? it on update an with me provide you Could . order recent my with me "
    "help could you if wondering was I , Hey";
inline constexpr char kDialogueCharFlip[] =
    "?ti no etadpu na htiw em edivorp uoy dluoC .redro tnecer ym htiw em pleh "
    "dluoc uoy fi gnirednow saw I ,yeH";
inline constexpr char kIrrelevantAnswer[] = "Deep, resonant, and vibrant.";

inline constexpr char kCommunicationQuestion[] =
    "Summarize the best practices for effective communication.";
inline constexpr char kCommunicationFact[] =
    "Good communication is essential for success in any professional or "
    "personal setting. To be effective, communicators should be clear, "
    "concise, and professional in their approach. Nonverbal cues such as body "
    "language and eye contact can also help with getting your message across.";
inline constexpr char kCommunicationCounterfactual[] =
    "Avoid direct and clear language, use jargon and complex sentences, and "
    "never confirm or answer questions directly.";

inline constexpr char kDesktop[] = "A powerful desktop computer.";

// Stage orders of the learning, unlearning and retention tables, row by row.
inline const std::vector<std::vector<std::string>> kLearningRows = {
    {"ad_wflipped"},
    {"ad_cflipped"},
    {"ad_train", "ad_wflipped"},
    {"ad_train", "ad_cflipped"},
    {"ad_cflipped", "ad_wflipped"},
    {"ad_wflipped", "ad_cflipped"},
    {"ad_train", "ad_wflipped", "ad_cflipped"},
    {"ad_train", "ad_cflipped", "ad_wflipped"},
    {"ad_wflipped", "ad_cflipped", "ad_train"},
    {"ad_cflipped", "ad_wflipped", "ad_train"},
    {"irr_train"},
    {"ad_train", "irr_train"},
    {"gk"},
    {"cfact_train"},
    {"gk", "cfact_train"},
};

inline const std::vector<std::vector<std::string>> kUnlearningRows = {
    {"ad_train", "ad_wflipped", "ad_train"},
    {"ad_train", "ad_wflipped", "ch_train"},
    {"ad_train", "ad_cflipped", "ad_train"},
    {"ad_train", "ad_cflipped", "ch_train"},
    {"ad_train", "ad_wflipped", "ad_cflipped", "ad_train"},
    {"ad_train", "ad_wflipped", "ad_cflipped", "ch_train"},
    {"ad_train", "ad_cflipped", "ad_wflipped", "ad_train"},
    {"ad_train", "ad_cflipped", "ad_wflipped", "ch_train"},
    {"ad_train", "irr_train", "ad_train"},
    {"gk", "cfact_train", "gk"},
};

inline const std::vector<std::pair<std::vector<std::string>, std::string>>
    kRetentionRows = {
        {{"ad_train", "ad_wflipped", "ad_train"}, "wtest"},
        {{"ad_train", "ad_cflipped", "ad_train"}, "ctest"},
        {{"ad_train", "ad_wflipped", "ad_cflipped", "ad_train"}, "wtest"},
        {{"ad_train", "ad_wflipped", "ad_cflipped", "ad_train"}, "ctest"},
        {{"ad_train", "ad_cflipped", "ad_wflipped", "ad_train"}, "ctest"},
        {{"ad_train", "ad_cflipped", "ad_wflipped", "ad_train"}, "wtest"},
};

}  // namespace noisekit::testing

#endif  // NOISEKIT_TESTS_EXAMPLES_H_
