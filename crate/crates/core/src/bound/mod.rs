//! Guaranteed lower bounds on the limit constant.
//!
//! The route goes through ball sizes: [`css_count`] and
//! [`ball_upper_bound`] cap, in exact integers, how many strings sit
//! within a given edit radius of any center, and
//! [`exponential_bound_rhs`] turns the cap into `2^(n g)` form with
//! the rate function [`g`] in the exponent. Wherever `max g(beta, .)`
//! is negative, balls of radius `beta * n` are exponentially small, so
//! a random pair of strings is almost surely farther apart; the
//! largest such `beta` is a bound on the normalised expected distance
//! in the limit.
//!
//! Locating that threshold trustworthily is the heart of the module.
//! Every comparison that decides anything runs in outward-rounded
//! interval arithmetic (plain doubles by default, dyadic
//! arbitrary-precision on request), so [`sign_g`], [`g_bracket`] and
//! [`beta_star`] return certificates, never hopes. [`beta_hat_analytic`]
//! trades tightness for a closed form built on one cached constant,
//! and [`ecc_lower_bound`] applies the ball cap directly to finite
//! `n`.

mod analytic;
mod bracket;
mod counting;
mod gfun;
mod hiprec;
mod interval;

pub use analytic::{beta_hat_analytic, m_constant_bracket};
pub use bracket::{
    beta_star, beta_star_traced, beta_star_with, g_bracket, g_bracket_with, sign_g, sign_g_with,
    BetaBracket, BracketStatus, GSign, Precision, DEFAULT_SIGN_BUDGET,
};
pub use counting::{ball_upper_bound, css_count, ecc_lower_bound, exponential_bound_rhs, BallBound};
pub use gfun::{
    d2g_ddelta2, dg_ddelta, entropy, entropy_d1, entropy_d2, g, tangent_upper, GEvalPoint,
};
