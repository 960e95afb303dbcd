//! Neural building blocks: dense feed-forward nets, the GRU classifier, and
//! binary cross-entropy.

pub mod dense;
pub mod gru;
pub mod loss;
