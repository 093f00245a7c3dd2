import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

// Compiled tests run from dist/tests/, fixtures stay in tests/fixtures/.
export function fixture<T>(name: string): T {
  const path = join(here, "..", "..", "tests", "fixtures", name);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

type RouteTable = Record<string, { status?: number; body: unknown }>;

// Minimal fetch double driven by a route table keyed on "METHOD path".
export function fakeFetch(routes: RouteTable) {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    const method = init?.method ?? "GET";
    const key = `${method} ${url}`;
    const route = routes[key] ?? routes[`${method} *`];
    if (!route) {
      return new Response(JSON.stringify({ error: `no route ${key}` }), {
        status: 404,
        headers: { "Content-Type": "application/json" },
      });
    }
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { impl, calls };
}
