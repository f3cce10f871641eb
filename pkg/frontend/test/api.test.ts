import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";

function fakeFetch(
  handler: (url: string) => { status: number; body: string; type?: string },
): typeof fetch {
  return (async (input: RequestInfo | URL) => {
    const { status, body, type } = handler(String(input));
    return new Response(body, {
      status,
      headers: { "content-type": type ?? "application/json" },
    });
  }) as typeof fetch;
}

describe("ApiClient", () => {
  it("logs every request with its parameters", async () => {
    const client = new ApiClient(
      "http://x",
      fakeFetch(() => ({ status: 200, body: '{"players":["a"]}' })),
    );
    await client.players();
    await client.getSvg("/api/viz/similarity", { exercise: "e" });
    expect(client.log).toEqual([
      { method: "GET", path: "/api/players", params: {} },
      {
        method: "GET",
        path: "/api/viz/similarity",
        params: { exercise: "e", format: "svg" },
      },
    ]);
  });

  it("adds format=svg to svg requests and returns raw text", async () => {
    let seen = "";
    const client = new ApiClient(
      "http://x",
      fakeFetch((url) => {
        seen = url;
        return { status: 200, body: "<svg/>", type: "image/svg+xml" };
      }),
    );
    const svg = await client.getSvg("/api/viz/progress", { recording: "r1" });
    expect(svg).toBe("<svg/>");
    expect(seen).toBe("http://x/api/viz/progress?recording=r1&format=svg");
  });

  it("adds format=json only to viz endpoints", async () => {
    const urls: string[] = [];
    const client = new ApiClient(
      "",
      fakeFetch((url) => {
        urls.push(url);
        return { status: 200, body: "{}" };
      }),
    );
    await client.getJson("/api/viz/fretboard", { recording: "r" });
    await client.getJson("/api/exercises");
    expect(urls[0]).toContain("format=json");
    expect(urls[1]).toBe("/api/exercises");
  });

  it("raises ApiError with the structured body on failure", async () => {
    const client = new ApiClient(
      "",
      fakeFetch(() => ({
        status: 404,
        body: '{"code":"notFound","message":"unknown recording"}',
      })),
    );
    const error = await client.players().catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(404);
    expect((error as ApiError).body?.code).toBe("notFound");
  });
});
