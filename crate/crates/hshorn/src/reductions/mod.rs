//! Turing-machine encodings into Horn-HS: the machines, the gadgets, the six
//! generators and bounded-window checks of their intended models.

pub mod generators;
pub mod tm;
pub mod tricks;
pub mod window;
