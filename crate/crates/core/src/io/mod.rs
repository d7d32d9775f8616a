mod dot;
mod facts;
mod text;

pub use dot::export_drawing;
pub use facts::{export_logic_facts, IdNotQuotable};
pub use text::{parse_document, parse_model, serialize_model, Diagnostic, ParseError, ParsedModel};
