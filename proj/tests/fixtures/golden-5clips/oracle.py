# Independent re-derivation of expected/predictions.jsonl; prints JSONL to stdout.
import json, math, re, struct
M=(1<<64)-1
def fnv(s):
    h=0xcbf29ce484222325
    for b in s.encode(): h=((h^b)*0x100000001b3)&M
    return h
def mock(seed,s,d):
    st=fnv(s)^((seed*0x9E3779B97F4A7C15)&M)
    if st==0: st=0x9E3779B97F4A7C15
    v=[]
    for _ in range(d):
        st^=st>>12; st^=(st<<25)&M; st^=st>>27
        r=(st*0x2545F4914F6CDD1D)&M
        v.append(2*((r>>11)*2**-53)-1)
    n=math.sqrt(sum(x*x for x in v))
    return [struct.unpack('f',struct.pack('f',x/n))[0] for x in v]
def cos(a,b):
    d=na=nb=0.0
    for x,y in zip(a,b): d+=x*y; na+=x*x; nb+=y*y
    return max(-1,min(1,d/(math.sqrt(na)*math.sqrt(nb))))
tok=lambda s:set(re.findall(r'[a-z0-9]+',s.lower()))
fx='tests/fixtures/golden-5clips/'
tr=json.load(open(fx+'transcript.json')); gt=json.load(open(fx+'ground_truth.json'))
cfg=json.load(open(fx+'config.json')); seed=cfg['seed']; D=16
clips=[(f"cook01:{i}",s['start'],s['end'],s['text']) for i,s in enumerate(tr['segments'])]
key=lambda sc,st,cid:(-sc,st,cid)
out=[]
for a in gt['videos'][0]['annotations']:
    q=a['sentence']
    qv=mock(seed,q,D); qt=mock(seed+1,q,D)
    vis=sorted([(cos(mock(seed,c[0],D),qv),c) for c in clips],key=lambda p:key(p[0],p[1][1],p[1][0]))[:cfg['k_visual']]
    sims={c[0]:cos(mock(seed+1,c[3],D),qt) for c in clips}
    sem=sorted(clips,key=lambda c:key(sims[c[0]],c[1],c[0]))[:cfg['k_semantic']]
    semids=[c[0] for c in sem]
    lex=[c for c in clips if tok(c[3])&tok(q) and c[0] not in semids]
    lex.sort(key=lambda c:key(sims[c[0]],c[1],c[0]))
    aur=(semids+[c[0] for c in lex])[:cfg['k_aural']]
    res=[]
    for s,c in vis:
        if c[0] in aur:
            res.append({"aural_score":sims[c[0]],"clip_id":c[0],"end":c[2],"fused_score":(s+sims[c[0]])/2,"start":c[1],"visual_score":s})
    res.sort(key=lambda r:key(r['fused_score'],r['start'],r['clip_id']))
    out.append(json.dumps({"query_id":str(a['query_id']),"results":res,"video_id":"cook01"},separators=(',',':')))
print("\n".join(out))
