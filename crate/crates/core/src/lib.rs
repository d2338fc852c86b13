pub mod executor;
pub mod lang;
pub mod rdf;
pub mod reference;
pub mod safeness;
pub mod semantics;
pub mod sparql;
pub mod translators;
