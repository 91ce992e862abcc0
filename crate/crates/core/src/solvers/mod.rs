//! Codebreaker side: one solver per query model, each emitting the recovered
//! set together with exact query and round accounting.

mod hamming;
mod sphere;
mod strong;

pub use hamming::{
    choose_two_round_params, paper_log2_t, solve_hamming_two_round, DeskOverrides,
    HammingSolveReport, ParamMode, TwoRoundParams,
};
pub use sphere::{expand_hull_once, find_basis, solve_sphere, SphereSolveOptions, SphereSolveReport};
pub use strong::{
    find_point_with_prefix, solve_strong, solve_strong_leveled, PrefixTrie, StrongSolveReport,
};
