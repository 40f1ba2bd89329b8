/** Wire types mirroring the session service JSON payloads. */

export type KeyStar = number | "*";
export type Kind = "rpi" | "bs" | "cvy";
export type Dir = "fwd" | "bwd";

export interface NameDoc {
  base: string;
  inst: KeyStar;
}

export interface MemoryDoc {
  kind: Kind;
  gamma: number[];
  w?: KeyStar;
  omega?: KeyStar[];
}

export type ActionDoc =
  | { type: "out"; subj: string; obj: NameDoc }
  | { type: "in"; subj: string; var: string }
  | { type: "bout"; subj: string; obj: string; mem: MemoryDoc }
  | { type: "tau" };

export type ProcessDoc =
  | { t: "nil" }
  | { t: "out"; subj: NameDoc; obj: NameDoc; cont: ProcessDoc }
  | { t: "in"; subj: NameDoc; var: string; cont: ProcessDoc }
  | { t: "par"; left: ProcessDoc; right: ProcessDoc }
  | { t: "new"; name: string; body: ProcessDoc };

export type RProcessDoc =
  | { t: "lift"; proc: ProcessDoc }
  | { t: "pastout"; subj: NameDoc; obj: NameDoc; key: number;
      cause: KeyStar[]; cont: RProcessDoc }
  | { t: "pastin"; subj: NameDoc; var: string; key: number;
      cause: KeyStar[]; cont: RProcessDoc }
  | { t: "rpar"; left: RProcessDoc; right: RProcessDoc }
  | { t: "res"; name: string; mem: MemoryDoc; body: RProcessDoc };

export interface TransitionRow {
  id: string;
  key: number;
  cause: KeyStar[];
  inst: KeyStar;
  action: ActionDoc;
  dir: Dir;
  pretty: string;
}

export interface StateDoc {
  id: string;
  semantics: Kind;
  source: string;
  state: RProcessDoc;
  pretty: string;
  key_counter: number;
  trace_len: number;
  applied?: TransitionRow;
}

export interface TraceEntry {
  key: number;
  cause: KeyStar[];
  inst: KeyStar;
  action: ActionDoc;
  dir: Dir;
  pretty: string;
  k_f: number[] | null;
}

export interface TraceDoc {
  id: string;
  semantics: Kind;
  source: string;
  entries: TraceEntry[];
}

export interface GraphNode {
  id: number;
  key: number;
  dir: Dir;
  label: string;
}

export interface GraphEdge {
  from: number;
  to: number;
  type: "structural" | "object";
}

export interface GraphDoc {
  nodes: GraphNode[];
  edges: GraphEdge[];
}
