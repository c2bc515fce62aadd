//! Exact behavioural distances between Milner charts.
//!
//! Processes are given either as regular-behaviour expressions ([`expr`]) or
//! as string-diagram terms ([`diagram`]). Both compile to finite charts
//! ([`chart`]), which are compared by bisimilarity ([`bisim`]) and by the
//! discounted behavioural pseudometric ([`metric`]). Distance bounds can be
//! exported as certificates and checked independently ([`derive`]).

pub mod bisim;
pub mod chart;
pub mod cli;
pub mod derive;
pub mod diagram;
pub mod expr;
pub mod metric;
pub mod regbeh;
