#pragma once

#include <string_view>

namespace recmem {

// Probe and recommendation prompt scripts. These strings are contractual:
// the golden files under assets/prompts/ must stay byte-identical to them,
// and the acceptance suite enforces it. Do not reflow or "fix" wording.

inline constexpr std::string_view kEntityProbeSystem =
    "You are the MovieLens1M dataset. When given a lookup key (e.g., a MovieID), "
    "you will respond with the exact corresponding value from the dataset. Only "
    "respond with the value itself. If the key is unknown, respond with 'Unknown'. "
    "Below are examples of queries and their correct responses. Follow this "
    "pattern strictly. Let's think step by step.";

inline constexpr std::string_view kInteractionProbeSystem =
    "You are a Recommender Systems. Continue user-item interactions list "
    "providing the next interaction based on the MovieLens1M dataset. When given "
    "'UserID::CurrentInteraction', respond with 'UserID::NextInteraction'. Below "
    "are examples of queries and their correct responses. Follow this pattern "
    "strictly. Let's think step by step.";

inline constexpr std::string_view kRecommendationSystem =
    "You are a movie recommendation system for the MovieLens-1M dataset. Based "
    "on the user's past interactions, generate a ranked list of exactly 50 new "
    "movie recommendations. Your output must contain only the list in the "
    "following format: one line per recommendation in the exact format 'Rank. "
    "Title' (e.g., '1. Harry Potter'). Do not include any additional text, "
    "commentary, or explanation.";

inline constexpr std::string_view kRecommendationUserTemplate =
    "User {user_id} has interacted with the following movies: "
    "{training_history_str}. Based solely on these interactions, please generate "
    "a ranked list of exactly 50 movie recommendations. Output only the list "
    "with no additional commentary or explanation. Each recommendation must be "
    "on a new line in the exact format: 'Rank. Title' (for example: '1. Harry "
    "Potter').";

}  // namespace recmem
