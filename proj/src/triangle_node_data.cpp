// Embedded triangle interpolation node tables (unit simplex),
// orders 1..12.  Generated offline by tools/gen_triangle_nodes.py;
// do not edit by hand.

namespace volpot::detail {

static const double tri_nodes_p1[] = {
    2.50000000000000000e-01, 5.00000000000000000e-01,
};
static const double tri_nodes_p2[] = {
    1.66666666666666685e-01, 2.11324865405187134e-01,
    6.22008467928146236e-01, 2.11324865405187134e-01,
    1.05662432702593567e-01, 7.88675134594812866e-01,
};
static const double tri_nodes_p3[] = {
    9.99999999999999917e-02, 1.12701665379258298e-01,
    4.43649167310370851e-01, 1.12701665379258298e-01,
    7.87298334620741724e-01, 1.12701665379258298e-01,
    1.05662432702593567e-01, 5.00000000000000000e-01,
    3.94337567297406433e-01, 5.00000000000000000e-01,
    5.63508326896291489e-02, 8.87298334620741702e-01,
};
static const double tri_nodes_p4[] = {
    6.46110632135476898e-02, 6.94318442029737137e-02,
    3.07096311531159072e-01, 6.94318442029737137e-02,
    6.23471844265867103e-01, 6.94318442029737137e-02,
    8.65957092583478527e-01, 6.94318442029737137e-02,
    7.55090475943249045e-02, 3.30009478207571871e-01,
    3.34995260896214064e-01, 3.30009478207571871e-01,
    5.94481474198103266e-01, 3.30009478207571871e-01,
    6.97392085646511561e-02, 6.69990521792428129e-01,
    2.60270269642920715e-01, 6.69990521792428129e-01,
    3.47159221014868846e-02, 9.30568155797026231e-01,
};
static const double tri_nodes_p5[] = {
    4.47095217036448112e-02, 4.69100770306680181e-02,
    2.19940124839678564e-01, 4.69100770306680181e-02,
    4.76544961484665963e-01, 4.69100770306680181e-02,
    7.33149798129653307e-01, 4.69100770306680181e-02,
    9.08380401265687087e-01, 4.69100770306680181e-02,
    5.34093807251571143e-02, 2.30765344947158446e-01,
    2.53854727133169755e-01, 2.30765344947158446e-01,
    5.15379927919671688e-01, 2.30765344947158446e-01,
    7.15825274327684391e-01, 2.30765344947158446e-01,
    5.63508326896291489e-02, 5.00000000000000000e-01,
    2.50000000000000000e-01, 5.00000000000000000e-01,
    4.43649167310370851e-01, 5.00000000000000000e-01,
    4.87664554611398487e-02, 7.69234655052841498e-01,
    1.81998889486018639e-01, 7.69234655052841498e-01,
    2.34550385153340368e-02, 9.53089922969331926e-01,
};
static const double tri_nodes_p6[] = {
    3.26251512704344021e-02, 3.37652428984239750e-02,
    1.63675633088031430e-01, 3.37652428984239750e-02,
    3.67836302898351231e-01, 3.37652428984239750e-02,
    5.98398454203224794e-01, 3.37652428984239750e-02,
    8.02559124013544567e-01, 3.37652428984239750e-02,
    9.33609605831141609e-01, 3.37652428984239750e-02,
    3.89637301416006152e-02, 1.69395306766867759e-01,
    1.91674778548672486e-01, 1.69395306766867759e-01,
    4.15302346616566120e-01, 1.69395306766867759e-01,
    6.38929914684459699e-01, 1.69395306766867759e-01,
    7.91640963091531535e-01, 1.69395306766867759e-01,
    4.29998071774713234e-02, 3.80690406958401506e-01,
    2.04378035648601603e-01, 3.80690406958401506e-01,
    4.14931557392996919e-01, 3.80690406958401506e-01,
    5.76309785864127178e-01, 3.80690406958401506e-01,
    4.29044428581194306e-02, 6.19309593041598494e-01,
    1.90345203479200753e-01, 6.19309593041598494e-01,
    3.37785964100282055e-01, 6.19309593041598494e-01,
    3.57974404027787130e-02, 8.30604693233132241e-01,
    1.33597866364089046e-01, 8.30604693233132241e-01,
    1.68826214492119875e-02, 9.66234757101576025e-01,
};
static const double tri_nodes_p7[] = {
    2.47985426820927224e-02, 2.54460438286208124e-02,
    1.25945902810518040e-01, 2.54460438286208124e-02,
    2.89517979151782234e-01, 2.54460438286208124e-02,
    4.87276978085689594e-01, 2.54460438286208124e-02,
    6.85035977019596842e-01, 2.54460438286208124e-02,
    8.48608053360861203e-01, 2.54460438286208124e-02,
    9.49755413489286493e-01, 2.54460438286208124e-02,
    2.94016117484719210e-02, 1.29234407200302770e-01,
    1.47503604714338155e-01, 1.29234407200302770e-01,
    3.31492107888290477e-01, 1.29234407200302770e-01,
    5.39273484911406809e-01, 1.29234407200302770e-01,
    7.23261988085359020e-01, 1.29234407200302770e-01,
    8.41363981051225340e-01, 1.29234407200302770e-01,
    3.29741521721524170e-02, 2.97077424311301408e-01,
    1.62210170649947610e-01, 2.97077424311301408e-01,
    3.51461287844349268e-01, 2.97077424311301408e-01,
    5.40712405038750843e-01, 2.97077424311301408e-01,
    6.69948423516546043e-01, 2.97077424311301408e-01,
    3.47159221014868569e-02, 5.00000000000000000e-01,
    1.65004739103785936e-01, 5.00000000000000000e-01,
    3.34995260896214064e-01, 5.00000000000000000e-01,
    4.65284077898513115e-01, 5.00000000000000000e-01,
    3.34811204664642315e-02, 7.02922575688698537e-01,
    1.48538712155650732e-01, 7.02922575688698537e-01,
    2.63596303844837232e-01, 7.02922575688698537e-01,
    2.73104437073231308e-02, 8.70765592799697230e-01,
    1.01923963492979636e-01, 8.70765592799697230e-01,
    1.27230219143104062e-02, 9.74553956171379188e-01,
};
static const double tri_nodes_p8[] = {
    1.94608478769852933e-02, 1.98550717512318564e-02,
    9.96481604529950576e-02, 1.98550717512318564e-02,
    2.32523501019462842e-01, 1.98550717512318564e-02,
    4.00176196870765499e-01, 1.98550717512318564e-02,
    5.79968731378002755e-01, 1.98550717512318564e-02,
    7.47621427229305358e-01, 1.98550717512318564e-02,
    8.80496767795773128e-01, 1.98550717512318564e-02,
    9.60684080371782989e-01, 1.98550717512318564e-02,
    2.28590269648404551e-02, 1.01666761293186636e-01,
    1.16095563572603103e-01, 1.01666761293186636e-01,
    2.66874524728249629e-01, 1.01666761293186636e-01,
    4.49166619353406682e-01, 1.01666761293186636e-01,
    6.31458713978563679e-01, 1.01666761293186636e-01,
    7.82237675134210275e-01, 1.01666761293186636e-01,
    8.75474211741972930e-01, 1.01666761293186636e-01,
    2.57549861851214708e-02, 2.37233795041835505e-01,
    1.29209015280287803e-01, 2.37233795041835505e-01,
    2.90377776979639124e-01, 2.37233795041835505e-01,
    4.72388427978525371e-01, 2.37233795041835505e-01,
    6.33557189677876664e-01, 2.37233795041835505e-01,
    7.37011218773042986e-01, 2.37233795041835505e-01,
    2.77575051201160022e-02, 4.08282678752175054e-01,
    1.36547851748962890e-01, 4.08282678752175054e-01,
    2.95858660623912473e-01, 4.08282678752175054e-01,
    4.55169469498862000e-01, 4.08282678752175054e-01,
    5.63959816127708957e-01, 4.08282678752175054e-01,
    2.83478193418937839e-02, 5.91717321247824946e-01,
    1.34737153776194968e-01, 5.91717321247824946e-01,
    2.73545524975980059e-01, 5.91717321247824946e-01,
    3.79934859410281267e-01, 5.91717321247824946e-01,
    2.67366437854564924e-02, 7.62766204958164495e-01,
    1.18616897520917752e-01, 7.62766204958164495e-01,
    2.10497151256379023e-01, 7.62766204958164495e-01,
    2.14847146464639538e-02, 8.98333238706813364e-01,
    8.01820466467226822e-02, 8.98333238706813364e-01,
    9.92753587561590045e-03, 9.80144928248768199e-01,
};
static const double tri_nodes_p9[] = {
    1.56664376591340235e-02, 1.59198802461869571e-02,
    8.06792637689521946e-02, 1.59198802461869571e-02,
    1.90236743404124109e-01, 1.59198802461869571e-02,
    3.32494386010004472e-01, 1.59198802461869571e-02,
    4.92040059876906521e-01, 1.59198802461869571e-02,
    6.51585733743808682e-01, 1.59198802461869571e-02,
    7.93843376349688934e-01, 1.59198802461869571e-02,
    9.03400855984860862e-01, 1.59198802461869571e-02,
    9.68413682094679040e-01, 1.59198802461869571e-02,
    1.82272646867320150e-02, 8.19844463366821152e-02,
    9.33316681577211066e-02, 8.19844463366821152e-02,
    2.17784313702980709e-01, 8.19844463366821152e-02,
    3.74809849385820515e-01, 8.19844463366821152e-02,
    5.43205704277497370e-01, 8.19844463366821152e-02,
    7.00231239960337204e-01, 8.19844463366821152e-02,
    8.24683885505596792e-01, 8.19844463366821152e-02,
    8.99788288976585915e-01, 8.19844463366821152e-02,
    2.05269600941719865e-02, 1.93314283649704821e-01,
    1.04251550349481983e-01, 1.93314283649704821e-01,
    2.39648114842062776e-01, 1.93314283649704821e-01,
    4.03342858175147589e-01, 1.93314283649704821e-01,
    5.67037601508232347e-01, 1.93314283649704821e-01,
    7.02434166000813209e-01, 1.93314283649704821e-01,
    7.86158756256123192e-01, 1.93314283649704821e-01,
    2.23568692501495483e-02, 3.37873288298095542e-01,
    1.12161157447281529e-01, 3.37873288298095542e-01,
    2.52065287335826227e-01, 3.37873288298095542e-01,
    4.10061424366078286e-01, 3.37873288298095542e-01,
    5.49965554254623012e-01, 3.37873288298095542e-01,
    6.39769842451754944e-01, 3.37873288298095542e-01,
    2.34550385153340091e-02, 5.00000000000000000e-01,
    1.15382672473579223e-01, 5.00000000000000000e-01,
    2.50000000000000000e-01, 5.00000000000000000e-01,
    3.84617327526420749e-01, 5.00000000000000000e-01,
    4.76544961484665963e-01, 5.00000000000000000e-01,
    2.34591655134597891e-02, 6.62126711701904513e-01,
    1.11501387571530997e-01, 6.62126711701904513e-01,
    2.26371900726564490e-01, 6.62126711701904513e-01,
    3.14414122784635708e-01, 6.62126711701904513e-01,
    2.17868417089200558e-02, 8.06685716350295179e-01,
    9.66571418248524106e-02, 8.06685716350295179e-01,
    1.71527441940784758e-01, 8.06685716350295179e-01,
    1.73253520874181340e-02, 9.18015553663317885e-01,
    6.46590942492639847e-02, 9.18015553663317885e-01,
    7.95994012309347854e-03, 9.84080119753813043e-01,
};
static const double tri_nodes_p10[] = {
    1.28765184279078359e-02, 1.30467357414141283e-02,
    6.65880753571853334e-02, 1.30467357414141283e-02,
    1.58203886528673537e-01, 1.30467357414141283e-02,
    2.79606132654044492e-01, 1.30467357414141283e-02,
    4.20010624718162862e-01, 1.30467357414141283e-02,
    5.66942639540423010e-01, 1.30467357414141283e-02,
    7.07347131604541435e-01, 1.30467357414141283e-02,
    8.28749377729912307e-01, 1.30467357414141283e-02,
    9.20365188901400511e-01, 1.30467357414141283e-02,
    9.74076745830678048e-01, 1.30467357414141283e-02,
    1.48457927246194530e-02, 6.74683166555077873e-02,
    7.64530937504123570e-02, 6.74683166555077873e-02,
    1.80271694346393896e-01, 6.74683166555077873e-02,
    3.15077546293761945e-01, 6.74683166555077873e-02,
    4.66265841672246106e-01, 6.74683166555077873e-02,
    6.17454137050730267e-01, 6.74683166555077873e-02,
    7.52259988998098317e-01, 6.74683166555077873e-02,
    8.56078589594079897e-01, 6.74683166555077873e-02,
    9.17685890619872713e-01, 6.74683166555077873e-02,
    1.66723987391412219e-02, 1.60295215850487782e-01,
    8.53700658468752732e-02, 1.60295215850487782e-01,
    1.99206352658574115e-01, 1.60295215850487782e-01,
    3.42836918633579790e-01, 1.60295215850487782e-01,
    4.96867865515932428e-01, 1.60295215850487782e-01,
    6.40498431490938103e-01, 1.60295215850487782e-01,
    7.54334718302636986e-01, 1.60295215850487782e-01,
    8.23032385410371048e-01, 1.60295215850487782e-01,
    1.82371210113780151e-02, 2.83302302935376393e-01,
    9.26220020219688106e-02, 2.83302302935376393e-01,
    2.12914705853799735e-01, 2.83302302935376393e-01,
    3.58348848532311803e-01, 2.83302302935376393e-01,
    5.03782991210823816e-01, 2.83302302935376393e-01,
    6.24075695042654810e-01, 2.83302302935376393e-01,
    6.98460576053245630e-01, 2.83302302935376393e-01,
    1.93960105577405291e-02, 4.25562830509184420e-01,
    9.73069605441879149e-02, 4.25562830509184420e-01,
    2.18682719825490840e-01, 4.25562830509184420e-01,
    3.55754449665324712e-01, 4.25562830509184420e-01,
    4.77130208946627665e-01, 4.25562830509184420e-01,
    5.55041158933075041e-01, 4.25562830509184420e-01,
    1.99631851605749575e-02, 5.74437169490815580e-01,
    9.82051533791410691e-02, 5.74437169490815580e-01,
    2.12781415254592210e-01, 5.74437169490815580e-01,
    3.27357677130043323e-01, 5.74437169490815580e-01,
    4.05599645348609428e-01, 5.74437169490815580e-01,
    1.96702013597527155e-02, 7.16697697064623607e-01,
    9.34924451667070167e-02, 7.16697697064623607e-01,
    1.89809857768669377e-01, 7.16697697064623607e-01,
    2.63632101575623667e-01, 7.16697697064623607e-01,
    1.80655377786776532e-02, 8.39704784149512218e-01,
    8.01476079252438911e-02, 8.39704784149512218e-01,
    1.42229678071810139e-01, 8.39704784149512218e-01,
    1.42577329363397284e-02, 9.32531683344492213e-01,
    5.32105837191680572e-02, 9.32531683344492213e-01,
    6.52336787070706414e-03, 9.86953264258585872e-01,
};
static const double tri_nodes_p11[] = {
    1.07671730954411998e-02, 1.08856709269715135e-02,
    5.58540004288162403e-02, 1.08856709269715135e-02,
    1.33455258979163244e-01, 1.08856709269715135e-02,
    2.37834454754113300e-01, 1.08856709269715135e-02,
    3.61252665608499057e-01, 1.08856709269715135e-02,
    4.94557164536514215e-01, 1.08856709269715135e-02,
    6.27861663464529318e-01, 1.08856709269715135e-02,
    7.51279874318915186e-01, 1.08856709269715135e-02,
    8.55659070093865215e-01, 1.08856709269715135e-02,
    9.33260328644212267e-01, 1.08856709269715135e-02,
    9.78347155977587146e-01, 1.08856709269715135e-02,
    1.23100035333401376e-02, 5.64687001159523416e-02,
    6.36584685149598067e-02, 5.64687001159523416e-02,
    1.51243553376604750e-01, 5.64687001159523416e-02,
    2.67304590148759957e-01, 5.64687001159523416e-02,
    4.01531850652665445e-01, 5.64687001159523416e-02,
    5.41999449231382213e-01, 5.64687001159523416e-02,
    6.76226709735287757e-01, 5.64687001159523416e-02,
    7.92287746507442936e-01, 5.64687001159523416e-02,
    8.79872831369087893e-01, 5.64687001159523416e-02,
    9.31221296350707606e-01, 5.64687001159523416e-02,
    1.37719063682195265e-02, 1.34923997212975322e-01,
    7.09227771276442903e-02, 1.34923997212975322e-01,
    1.67231547781323736e-01, 1.34923997212975322e-01,
    2.92286073689424497e-01, 1.34923997212975322e-01,
    4.32538001393512339e-01, 1.34923997212975322e-01,
    5.72789929097600181e-01, 1.34923997212975322e-01,
    6.97844455005700914e-01, 1.34923997212975322e-01,
    7.94153225659380402e-01, 1.34923997212975322e-01,
    8.51304096418805112e-01, 1.34923997212975322e-01,
    1.50808813212099154e-02, 2.40451935396594041e-01,
    7.72207917747363692e-02, 2.40451935396594041e-01,
    1.80190469882547250e-01, 2.40451935396594041e-01,
    3.10110318457308687e-01, 2.40451935396594041e-01,
    4.49437746146097272e-01, 2.40451935396594041e-01,
    5.79357594720858682e-01, 2.40451935396594041e-01,
    6.82327272828669562e-01, 2.40451935396594041e-01,
    7.44467183282196077e-01, 2.40451935396594041e-01,
    1.61524253943444787e-02, 3.65228422023827548e-01,
    8.20343285873514072e-02, 3.65228422023827548e-01,
    1.88576305411181727e-01, 3.65228422023827548e-01,
    3.17385788988086226e-01, 3.65228422023827548e-01,
    4.46195272564990697e-01, 3.65228422023827548e-01,
    5.52737249388821072e-01, 3.65228422023827548e-01,
    6.18619152581827980e-01, 3.65228422023827548e-01,
    1.68826214492119875e-02, 5.00000000000000000e-01,
    8.46976533834338796e-02, 5.00000000000000000e-01,
    1.90345203479200753e-01, 5.00000000000000000e-01,
    3.09654796520799247e-01, 5.00000000000000000e-01,
    4.15302346616566120e-01, 5.00000000000000000e-01,
    4.83117378550788013e-01, 5.00000000000000000e-01,
    1.71328934109270768e-02, 6.34771577976172452e-01,
    8.42820627928349275e-02, 6.34771577976172452e-01,
    1.82614211011913774e-01, 6.34771577976172452e-01,
    2.80946359230992593e-01, 6.34771577976172452e-01,
    3.48095528612900440e-01, 6.34771577976172452e-01,
    1.66950213167598172e-02, 7.59548064603405959e-01,
    7.93514177342307808e-02, 7.59548064603405959e-01,
    1.61100517662363274e-01, 7.59548064603405959e-01,
    2.23756914079834196e-01, 7.59548064603405959e-01,
    1.52061591855287247e-02, 8.65076002787024678e-01,
    6.74619986064876609e-02, 8.65076002787024678e-01,
    1.19717838027446594e-01, 8.65076002787024678e-01,
    1.19332404516094923e-02, 9.43531299884047714e-01,
    4.45354596643427955e-02, 9.43531299884047714e-01,
    5.44283546348578451e-03, 9.89114329073028431e-01,
};
static const double tri_nodes_p12[] = {
    9.13468032429456261e-03, 9.21968287664037822e-03,
    4.74993675699593304e-02, 9.21968287664037822e-03,
    1.13987950715501898e-01, 9.21968287664037822e-03,
    2.04438624061510948e-01, 9.21968287664037822e-03,
    3.13170053948990945e-01, 9.21968287664037822e-03,
    4.33350760461963525e-01, 9.21968287664037822e-03,
    5.57429556661396042e-01, 9.21968287664037822e-03,
    6.77610263174368566e-01, 9.21968287664037822e-03,
    7.86341693061848535e-01, 9.21968287664037822e-03,
    8.76792366407857626e-01, 9.21968287664037822e-03,
    9.43280949553400250e-01, 9.21968287664037822e-03,
    9.81645636799064913e-01, 9.21968287664037822e-03,
    1.03637969296084213e-02, 4.79413718147625456e-02,
    5.37615131677971481e-02, 4.79413718147625456e-02,
    1.28455555695854096e-01, 4.79413718147625456e-02,
    2.28924339758166673e-01, 4.79413718147625456e-02,
    3.47718870446264205e-01, 4.79413718147625456e-02,
    4.76029314092618727e-01, 4.79413718147625456e-02,
    6.04339757738973193e-01, 4.79413718147625456e-02,
    7.23134288427070837e-01, 4.79413718147625456e-02,
    8.23603072489383359e-01, 4.79413718147625456e-02,
    8.98297115017440362e-01, 4.79413718147625456e-02,
    9.41694831255629028e-01, 4.79413718147625456e-02,
    1.15457262391176398e-02, 1.15048662902847654e-01,
    5.97061770359856928e-02, 1.15048662902847654e-01,
    1.41853465597165801e-01, 1.15048662902847654e-01,
    2.50708751785363837e-01, 1.15048662902847654e-01,
    3.76602395877951579e-01, 1.15048662902847654e-01,
    5.08348941219200823e-01, 1.15048662902847654e-01,
    6.34242585311788454e-01, 1.15048662902847654e-01,
    7.43097871499986518e-01, 1.15048662902847654e-01,
    8.25245160061166660e-01, 1.15048662902847654e-01,
    8.73405610858034698e-01, 1.15048662902847654e-01,
    1.26349558724327057e-02, 2.06341022856691259e-01,
    6.50676918212316074e-02, 2.06341022856691259e-01,
    1.53425616628616174e-01, 2.06341022856691259e-01,
    2.68156168394712735e-01, 2.06341022856691259e-01,
    3.96829488571654343e-01, 2.06341022856691259e-01,
    5.25502808748596006e-01, 2.06341022856691259e-01,
    6.40233360514692484e-01, 2.06341022856691259e-01,
    7.28591285322077065e-01, 2.06341022856691259e-01,
    7.81024021270876001e-01, 2.06341022856691259e-01,
    1.35791962781019460e-02, 3.16084250500909936e-01,
    6.95314992489748235e-02, 3.16084250500909936e-01,
    1.62247928742550451e-01, 3.16084250500909936e-01,
    2.79230954246290020e-01, 3.16084250500909936e-01,
    4.04684795252800045e-01, 3.16084250500909936e-01,
    5.21667820756539613e-01, 3.16084250500909936e-01,
    6.14384250250115227e-01, 3.16084250500909936e-01,
    6.70336553220988174e-01, 3.16084250500909936e-01,
    1.43163693152056140e-02, 4.37383295744265488e-01,
    7.27094362554779050e-02, 4.37383295744265488e-01,
    1.67140721374806817e-01, 4.37383295744265488e-01,
    2.81308352127867256e-01, 4.37383295744265488e-01,
    3.95475982880927668e-01, 4.37383295744265488e-01,
    4.89907268000256579e-01, 4.37383295744265488e-01,
    5.48300334940528877e-01, 4.37383295744265488e-01,
    1.47683532205183342e-02, 5.62616704255734512e-01,
    7.40906775573035026e-02, 5.62616704255734512e-01,
    1.66507624853691305e-01, 5.62616704255734512e-01,
    2.70875670890574183e-01, 5.62616704255734512e-01,
    3.63292618186962013e-01, 5.62616704255734512e-01,
    4.22614942523747150e-01, 5.62616704255734512e-01,
    1.48275365391786519e-02, 6.83915749499090064e-01,
    7.29412910992065233e-02, 6.83915749499090064e-01,
    1.58042125250454968e-01, 6.83915749499090064e-01,
    2.43142959401703385e-01, 6.83915749499090064e-01,
    3.01256713961731259e-01, 6.83915749499090064e-01,
    1.43266377516680296e-02, 7.93658977143308686e-01,
    6.80944932857533575e-02, 7.93658977143308686e-01,
    1.38246529570937943e-01, 7.93658977143308686e-01,
    1.92014385105023278e-01, 7.93658977143308686e-01,
    1.29661759088078241e-02, 8.84951337097152346e-01,
    5.75243314514238269e-02, 8.84951337097152346e-01,
    1.02082486994039837e-01, 8.84951337097152346e-01,
    1.01312039460947270e-02, 9.52058628185237454e-01,
    3.78101678686678169e-02, 9.52058628185237454e-01,
    4.60984143832021687e-03, 9.90780317123359566e-01,
};

const double* triangle_node_table(int p) {
    switch (p) {
    case 1: return tri_nodes_p1;
    case 2: return tri_nodes_p2;
    case 3: return tri_nodes_p3;
    case 4: return tri_nodes_p4;
    case 5: return tri_nodes_p5;
    case 6: return tri_nodes_p6;
    case 7: return tri_nodes_p7;
    case 8: return tri_nodes_p8;
    case 9: return tri_nodes_p9;
    case 10: return tri_nodes_p10;
    case 11: return tri_nodes_p11;
    case 12: return tri_nodes_p12;
    default: return nullptr;
    }
}

} // namespace volpot::detail
