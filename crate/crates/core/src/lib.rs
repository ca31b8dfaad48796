pub mod codegen;
pub mod fixture;
pub mod frontend;
pub mod kb;
pub mod llf;
pub mod metrics;
pub mod normalize;
pub mod pipeline;
pub mod reason;
pub mod smm;
