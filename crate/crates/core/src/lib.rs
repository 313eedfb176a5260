pub mod cfunc;
pub mod cli;
pub mod error;
pub mod master;
pub mod model;
pub mod ode;
pub mod phi;
pub mod quad;
pub mod regress;
pub mod roots;
pub mod series;
pub mod sinetype;
pub mod special;
pub mod spectrum;
