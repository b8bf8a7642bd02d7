pub mod alpha;
pub mod cli;
pub mod diag;
pub mod dynamics;
pub mod embed;
pub mod equality;
pub mod meta;
pub mod subst;
pub mod surface;
pub mod syntax;
pub mod typing;
pub mod wf;
