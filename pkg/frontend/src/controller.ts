/** View state and the actions that mutate it.
 *
 * The controller never invents transitions: the lists come verbatim from
 * the service, stepping posts a listed id, and after every acknowledged
 * mutation the whole view is re-fetched (no optimistic updates).  At most
 * one step request is in flight at a time.
 */

import { ApiError, type Api } from "./api.js";
import type {
  Dir,
  GraphDoc,
  Kind,
  StateDoc,
  TraceEntry,
  TransitionRow,
} from "./types.js";

export interface ViewState {
  session: StateDoc | null;
  fwd: TransitionRow[];
  bwd: TransitionRow[];
  trace: TraceEntry[];
  graph: GraphDoc;
  message: string;
  busy: boolean;
}

export const EXPIRED_MESSAGE = "transition expired — refresh";

function emptyView(): ViewState {
  return {
    session: null,
    fwd: [],
    bwd: [],
    trace: [],
    graph: { nodes: [], edges: [] },
    message: "",
    busy: false,
  };
}

export class Controller {
  view: ViewState = emptyView();

  constructor(
    private readonly client: Api,
    private readonly onChange: (v: ViewState) => void = () => {},
  ) {}

  private emit(): void {
    this.onChange(this.view);
  }

  /** Re-fetch everything the page shows from the current session. */
  async refresh(): Promise<void> {
    const session = this.view.session;
    if (!session) {
      return;
    }
    const id = session.id;
    const [state, fwd, bwd, trace, graph] = await Promise.all([
      this.client.getState(id),
      this.client.getTransitions(id, "fwd"),
      this.client.getTransitions(id, "bwd"),
      this.client.getTrace(id),
      this.client.getCausality(id),
    ]);
    this.view = {
      ...this.view,
      session: state,
      fwd,
      bwd,
      trace: trace.entries,
      graph,
    };
    this.emit();
  }

  async start(source: string, semantics: Kind): Promise<void> {
    try {
      const session = await this.client.createSession(source, semantics);
      this.view = { ...emptyView(), session };
      await this.refresh();
    } catch (err) {
      this.view = {
        ...this.view,
        message: err instanceof ApiError ? err.message : String(err),
      };
      this.emit();
    }
  }

  /** Restart from the same source under another memory discipline. */
  async switchSemantics(kind: Kind): Promise<void> {
    const session = this.view.session;
    if (!session) {
      return;
    }
    await this.start(session.source, kind);
  }

  /** Apply a listed transition.  Returns false if a step is already in
   * flight or no session exists. */
  async step(transitionId: string): Promise<boolean> {
    const session = this.view.session;
    if (!session || this.view.busy) {
      return false;
    }
    this.view = { ...this.view, busy: true, message: "" };
    this.emit();
    try {
      await this.client.step(session.id, transitionId);
    } catch (err) {
      const message =
        err instanceof ApiError && err.status === 409
          ? EXPIRED_MESSAGE
          : err instanceof ApiError
            ? err.message
            : String(err);
      this.view = { ...this.view, message };
    } finally {
      this.view = { ...this.view, busy: false };
      await this.refresh();
    }
    return true;
  }

  transitions(dir: Dir): TransitionRow[] {
    return dir === "fwd" ? this.view.fwd : this.view.bwd;
  }
}
