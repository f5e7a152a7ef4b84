//! Grammar excerpts printed alongside input errors. The full grammar is in
//! `docs/grammar.md`.

pub const MODEL: &str = "\
model document:
  document  := model*
  model     := 'model' ID '{' decl* '}'
  decl      := 'exo' ID ':' range
             | 'endo' ID ':' range '=' expr
  range     := '{' value (',' value)* '}'
  value     := INT | '-' INT | ID | STRING
  expr      := 'if' expr 'then' expr 'else' expr | or
  or        := and ('or' and)*
  and       := not ('and' not)*
  not       := 'not' not | cmp
  cmp       := sum (('=' | '!=' | '<' | '<=' | '>' | '>=') sum)?
  sum       := product (('+' | '-') product)*
  product   := unary ('*' unary)*
  unary     := '-' unary | atom
  atom      := INT | STRING | ID | 'true' | 'false'
             | ('min' | 'max') '(' expr (',' expr)* ')' | '(' expr ')'
";

pub const STATE: &str = "\
state document:
  document  := ('models' STRING | state)*
  state     := 'state' NAME '{' entry* '}'
  NAME      := ID ('-' (ID | INT))*
  entry     := ID '(' (ID '=' value (',' ID '=' value)*)? ')' ':' prob
  prob      := INT ('/' INT)?
";

pub const FORMULA: &str = "\
formula:
  formula   := ('[' ID '<-' value (',' ID '<-' value)* ']')? implies
  implies   := or ('->' implies)?
  or        := and ('|' and)*
  and       := unary ('&' unary)*
  unary     := '!' unary | 'true' | 'false' | '(' implies ')'
             | ID '=' value | ID '!=' value
";

pub const CONJUNCTION: &str = "\
conjunction:
  conj      := ID '=' value ('&' ID '=' value)*
";

pub const CONTEXT: &str = "\
context:
  context   := '(' assigns ')' | assigns
  assigns   := (ID '=' value (',' ID '=' value)*)?
";

pub const VALUES: &str = "\
contrast:
  values    := value (',' value)*
";

pub const QUERY: &str = "\
query document (one directive per line, '#' starts a comment line):
  'query' KIND      KIND := validate | solve | check-cause | find-causes
                          | check-explanation | find-explanations | score | compare
  'id' TEXT | 'provenance' TEXT
  'models' PATH | 'states' PATH
  'model' ID | 'state' NAME | 'context' context
  'phi' formula | 'x' conj | 'y' conj | 'contrast' values
  'max-size' INT | 'ex1b-conditional'
  'expect' KEY ('.' KEY)* '=' JSON
";
