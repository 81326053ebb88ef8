/**
 * Chart rendering seam. Views take a ChartRenderer so tests can observe
 * which document was drawn without spinning up a real canvas.
 */

export type ChartRenderer = (
  element: HTMLElement,
  doc: Record<string, unknown>,
) => Promise<void>;

/** Production renderer: embeds the compiled Vega-Lite document. */
export const vegaRenderer: ChartRenderer = async (element, doc) => {
  const { default: embed } = await import("vega-embed");
  await embed(element, doc as never, { actions: false });
};
