/**
 * Status polling with cancellation: ask every second while a run is active,
 * stop as soon as the caller navigates away.
 */

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
  signal?: AbortSignal;
}

export class PollAborted extends Error {
  constructor() {
    super("polling aborted");
    this.name = "PollAborted";
  }
}

function sleep(ms: number, signal?: AbortSignal): Promise<void> {
  return new Promise((resolve, reject) => {
    if (signal?.aborted) {
      reject(new PollAborted());
      return;
    }
    const timer = setTimeout(() => {
      signal?.removeEventListener("abort", onAbort);
      resolve();
    }, ms);
    const onAbort = () => {
      clearTimeout(timer);
      reject(new PollAborted());
    };
    signal?.addEventListener("abort", onAbort, { once: true });
  });
}

/** Repeatedly evaluate ``probe`` until ``isDone`` accepts its result. */
export async function pollUntil<T>(
  probe: () => Promise<T>,
  isDone: (value: T) => boolean,
  options: PollOptions = {},
): Promise<T> {
  const interval = options.intervalMs ?? 1000;
  const deadline =
    options.timeoutMs === undefined ? null : Date.now() + options.timeoutMs;
  for (;;) {
    if (options.signal?.aborted) throw new PollAborted();
    const value = await probe();
    if (isDone(value)) return value;
    if (deadline !== null && Date.now() >= deadline) {
      throw new Error("polling timed out");
    }
    await sleep(interval, options.signal);
  }
}
