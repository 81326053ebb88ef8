/** Shared test doubles: a scripted fetch stub and a recording chart renderer. */

import { Narrative, Recommendation } from "../src/api.js";
import { ChartRenderer } from "../src/chart.js";

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

export type RouteHandler = (
  request: RecordedRequest,
) => { status: number; body: unknown };

/** Fetch stub dispatching on "METHOD /path" prefixes and recording traffic. */
export function fakeFetch(routes: Record<string, RouteHandler>): {
  fetchImpl: typeof fetch;
  requests: RecordedRequest[];
  exchanges: string[];
} {
  const requests: RecordedRequest[] = [];
  const exchanges: string[] = [];
  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    const request: RecordedRequest = { method, path: url, body };
    requests.push(request);
    exchanges.push(JSON.stringify({ method, url, body: body ?? null }));
    for (const [key, handler] of Object.entries(routes)) {
      const [routeMethod, routePath] = key.split(" ", 2);
      if (method === routeMethod && url.split("?")[0] === routePath) {
        const { status, body: responseBody } = handler(request);
        const text = JSON.stringify(responseBody);
        exchanges.push(text);
        return new Response(text, {
          status,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    throw new Error(`unrouted request: ${method} ${url}`);
  }) as typeof fetch;
  return { fetchImpl, requests, exchanges };
}

/** Renderer double that records each document instead of drawing it. */
export function recordingRenderer(): {
  renderer: ChartRenderer;
  rendered: Record<string, unknown>[];
} {
  const rendered: Record<string, unknown>[] = [];
  const renderer: ChartRenderer = async (element, doc) => {
    rendered.push(doc);
    const marker = document.createElement("div");
    marker.className = "rendered-chart";
    marker.dataset.mark = String((doc as { mark?: unknown }).mark ?? "");
    element.append(marker);
  };
  return { renderer, rendered };
}

export const FIG5_QUERY = "Which product lines generate the most revenue?";

export function narrativeFor(topic: string): Narrative {
  return {
    e1: `The question asks how ${topic} varies across categories.`,
    e2: "A bar chart with summed values per category answers it directly.",
    caption: `Total ${topic} per product line, tallest bar first.`,
    suggestions: [
      `Break down ${topic} by region instead.`,
      `Show how ${topic} changed over the years.`,
      `Focus on the top 3 product lines by ${topic}.`,
    ],
  };
}

export function recommendationFor(query: string): Recommendation {
  const topic = query.toLowerCase().includes("year") ? "trend" : "revenue";
  return {
    vegazero:
      "mark bar encoding x product_line y aggregate sum revenue transform group x sort y desc",
    narrative: narrativeFor(topic),
    doc: {
      $schema: "https://vega.github.io/schema/vega-lite/v5.json",
      mark: "bar",
      data: { values: [{ product_line: "Classic Cars", revenue: 3919615.66 }] },
      encoding: {
        x: { field: "product_line", type: "nominal", sort: "-y" },
        y: { field: "revenue", type: "quantitative" },
      },
      // The test tags each doc with its originating query so history
      // navigation can be asserted against the renderer log.
      description: query,
    },
    warnings: [],
    raw_text: `[VEGAZERO]\nmark bar ...\n(query: ${query})`,
  };
}
