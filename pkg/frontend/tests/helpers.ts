/** Shared test utilities: demo data and a real-server harness. */

import { spawn, type ChildProcess } from "node:child_process";

export { demoCsv, mulberry32 } from "../src/sidebar.js";

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export interface ServerHandle {
  port: number;
  baseUrl: string;
  stop(): Promise<void>;
}

/** Spawn the Python service on an ephemeral port and wait until healthy. */
export async function startServer(extraArgs: string[] = []): Promise<ServerHandle> {
  const proc: ChildProcess = spawn(
    "python3",
    ["-m", "pcporder.cli", "serve", "--host", "127.0.0.1", "--port", "0", ...extraArgs],
    { env: { ...process.env, PYTHONUNBUFFERED: "1" }, stdio: ["ignore", "pipe", "pipe"] },
  );

  const port = await new Promise<number>((resolve, reject) => {
    let log = "";
    const onData = (chunk: Buffer) => {
      log += chunk.toString();
      const match = log.match(/running on https?:\/\/[\d.]+:(\d+)/i);
      if (match) {
        cleanup();
        resolve(parseInt(match[1], 10));
      }
    };
    const onExit = (code: number | null) => {
      cleanup();
      reject(new Error(`server exited with ${code}:\n${log}`));
    };
    const timer = setTimeout(() => {
      cleanup();
      reject(new Error(`server did not announce a port:\n${log}`));
    }, 30_000);
    function cleanup() {
      clearTimeout(timer);
      proc.stdout?.off("data", onData);
      proc.stderr?.off("data", onData);
      proc.off("exit", onExit);
    }
    proc.stdout?.on("data", onData);
    proc.stderr?.on("data", onData);
    proc.on("exit", onExit);
  });

  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 15_000;
  for (;;) {
    try {
      const res = await fetch(`${baseUrl}/health`);
      if (res.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill("SIGKILL");
      throw new Error("server never became healthy");
    }
    await sleep(100);
  }

  return {
    port,
    baseUrl,
    stop: async () => {
      if (proc.exitCode !== null) return;
      const exited = new Promise<void>((resolve) => proc.once("exit", () => resolve()));
      proc.kill("SIGTERM");
      const killTimer = setTimeout(() => proc.kill("SIGKILL"), 5_000);
      await exited;
      clearTimeout(killTimer);
    },
  };
}
