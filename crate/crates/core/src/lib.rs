pub mod checker;
pub mod corpus;
pub mod godp;
pub mod greechie;
pub mod lattice;
pub mod mgegen;
pub mod ratlp;
pub mod states;
pub mod term;
