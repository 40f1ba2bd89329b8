import { describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../api.js";

function fakeFetch(status: number, doc: unknown) {
  return vi.fn(async (_url: string, _init?: RequestInit) => ({
    ok: status >= 200 && status < 300,
    status,
    json: async () => doc,
  }));
}

describe("client requests", () => {
  it("posts the source and semantics on session creation", async () => {
    const f = fakeFetch(201, { id: "abc", semantics: "rpi" });
    const client = new Client("http://srv", f);
    const doc = await client.createSession("b<a> | b(x)", "rpi");
    expect(doc.id).toBe("abc");
    expect(f).toHaveBeenCalledWith("http://srv/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ source: "b<a> | b(x)", semantics: "rpi" }),
    });
  });

  it("asks for transitions by direction and unwraps the list", async () => {
    const rows = [{ id: "fwd0-aaaaaaaa" }];
    const f = fakeFetch(200, { dir: "bwd", transitions: rows });
    const client = new Client("http://srv", f);
    expect(await client.getTransitions("abc", "bwd")).toEqual(rows);
    expect(f.mock.calls[0]![0]).toBe("http://srv/sessions/abc/transitions?dir=bwd");
  });

  it("posts the transition id on step", async () => {
    const f = fakeFetch(200, { id: "abc" });
    const client = new Client("http://srv", f);
    await client.step("abc", "fwd1-12345678");
    const [url, init] = f.mock.calls[0]!;
    expect(url).toBe("http://srv/sessions/abc/step");
    expect(JSON.parse(init!.body as string)).toEqual({
      transition_id: "fwd1-12345678",
    });
  });

  it("unwraps the replay verdict", async () => {
    const client = new Client("http://srv", fakeFetch(200, { ok: true }));
    expect(await client.replayMatches("abc")).toBe(true);
  });

  it("treats 204 as a bodyless success", async () => {
    const f = vi.fn(async () => ({
      ok: true,
      status: 204,
      json: async () => {
        throw new Error("no body");
      },
    }));
    const client = new Client("http://srv", f);
    await expect(client.deleteSession("abc")).resolves.toBeUndefined();
  });
});

describe("client errors", () => {
  it("surfaces the server detail with the status code", async () => {
    const f = fakeFetch(409, { detail: "transition no longer enabled" });
    const client = new Client("http://srv", f);
    const err = await client.step("abc", "fwd0-00000000").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.message).toBe("transition no longer enabled");
  });

  it("falls back to the status code when detail is missing", async () => {
    const client = new Client("http://srv", fakeFetch(500, {}));
    const err = await client.getState("abc").catch((e) => e);
    expect(err.message).toBe("HTTP 500");
  });
});
